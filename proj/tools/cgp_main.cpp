#include <string>
#include <vector>

#include "cgp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cgp::cli_main(args);
}
