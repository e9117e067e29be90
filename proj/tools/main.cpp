#include "pcone/cli.hpp"

#include <vector>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pcone::run_cli(std::move(args));
}
