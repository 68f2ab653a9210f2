#include <string>
#include <vector>

#include "rovclass/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rovclass::cli::run(args);
}
