#include <string>
#include <vector>

#include "idsolve/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return idsolve::cli::run(args);
}
