// psvm: train and evaluate SVMs on mixed hard/probabilistic labels.

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return psvm::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
