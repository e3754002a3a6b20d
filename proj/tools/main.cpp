#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  bratteli::cli::CommandResult result = bratteli::cli::run(args);
  if (!result.usage.empty()) std::cerr << result.usage;
  std::cout << result.render();
  return result.exit_code;
}
