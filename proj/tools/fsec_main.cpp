#include <string>
#include <vector>

#include "fsec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fsec::cli::dispatch(args);
}
