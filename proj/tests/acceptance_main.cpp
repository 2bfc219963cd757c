#include <CLI11.hpp>

#include <iostream>

#include "nldiff/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  nldiff::AcceptanceOptions options;
  std::string cli;
  app.add_option("--cli", cli, "nldiff executable; enables the verify exit-status check");
  app.add_option("--only", options.only, "criterion ids")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  options.cli_path = cli;
  options.on_result = [](const nldiff::CriterionResult& r) { std::cout << nldiff::format_result_line(r) << std::endl; };

  const auto results = nldiff::run_acceptance(options);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.pass;
  std::cout << passed << "/" << results.size() << " criteria passed" << std::endl;
  return passed == results.size() ? 0 : 1;
}
