#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace bratteli::cli {

enum class Status { ok, error };

struct CommandResult {
  Status status = Status::ok;
  nlohmann::json payload = nlohmann::json::object();
  std::vector<std::string> diagnostics;
  int exit_code = 0;  // 0 ok, 1 domain error, 2 usage or parse error
  std::string format = "json";
  std::string usage;  // help text when the command line could not be used

  std::string render() const;
};

// args excludes the program name.
CommandResult run(const std::vector<std::string>& args);

}  // namespace bratteli::cli
