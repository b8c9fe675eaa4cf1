#include <iostream>

#include "percotree_app/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return percotree::app::run_cli(args, std::cout, std::cerr);
}
