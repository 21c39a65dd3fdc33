// Runs `verify-all` through the CLI entry point and prints one line per
// acceptance criterion. Exit status 0 only if every criterion passes.

#include "finsler/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using finsler::Json;

int main(int argc, char** argv) {
  finsler::cli::RunConfig config;
  config.command = "verify-all";
  config.seed = argc > 1 ? std::stoull(argv[1]) : 1;
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  const int code = finsler::cli::run(config, out, err);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json summary;
  try {
    summary = Json::parse(out.str());
  } catch (const Json::exception& e) {
    std::cout << "[FAIL] verify-all produced no summary: " << e.what() << '\n' << err.str();
    return 1;
  }
  std::ofstream("acceptance_summary.json") << summary.dump(2) << '\n';

  int failed = 0;
  for (const auto& c : summary["criteria"]) {
    const bool pass = c["pass"].get<bool>();
    failed += pass ? 0 : 1;
    std::printf("[%s] %2d  %-55s %8.2f s\n", pass ? "PASS" : "FAIL", c["id"].get<int>(),
                c["title"].get<std::string>().c_str(), c["seconds"].get<double>());
    for (const auto& m : c["measurements"]) {
      const std::string relation = m["relation"].get<std::string>();
      std::string value;
      if (relation == "flag")
        value = m["pass"].get<bool>() ? "yes" : "no";
      else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e %s %.1e", m["value"].get<double>(), relation.c_str(),
                      m["limit"].get<double>());
        value = buf;
      }
      std::printf("         %s %s: %s\n", m["pass"].get<bool>() ? " " : "!", m["name"].get<std::string>().c_str(),
                  value.c_str());
    }
  }
  std::printf("verify-all exit code %d, wall time %.2f s, %d criteria failed\n", code, wall, failed);
  if (!err.str().empty()) std::cout << err.str();
  return failed == 0 && code == finsler::cli::kExitOk ? 0 : 1;
}
