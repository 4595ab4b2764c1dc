#include "flm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  auto parsed = flm::cli::parse_args(argc, argv);
  if (auto* code = std::get_if<int>(&parsed)) return *code;
  const auto& config = std::get<flm::cli::RunConfig>(parsed);

  const flm::cli::RunResult result = flm::cli::run(config);
  if (!result.message.empty()) std::cerr << result.message << '\n';
  if (config.out == "-" && !result.report.empty()) std::cout << result.report;
  return result.exit_code;
}
