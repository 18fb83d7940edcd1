#pragma once

#include <string>

namespace psvm {

/// Decimal text with 17 significant digits; parses back to the same double.
std::string format_double(double v);

}  // namespace psvm
