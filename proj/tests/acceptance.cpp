// Runs every acceptance criterion and prints one verdict line each.
// Usage: hyperwalk_acceptance [--only 1,5,9] [--seed N] [--threads N]

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include "hyperwalk/verify.hpp"

int main(int argc, char** argv) {
  hyperwalk::VerifyOptions opt;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    const std::string val = argv[i + 1];
    if (key == "--only") {
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ',')) opt.only.push_back(std::stoi(item));
    } else if (key == "--seed") {
      opt.seed = std::stoull(val);
    } else if (key == "--threads") {
      opt.threads = static_cast<unsigned>(std::stoul(val));
    } else {
      std::cerr << "unknown option " << key << "\n";
      return 2;
    }
  }
  int failed = 0;
  const auto results = hyperwalk::run_acceptance(opt, [&](const hyperwalk::CriterionResult& r) {
    std::cout << hyperwalk::format_result(r) << std::endl;
    failed += r.pass ? 0 : 1;
  });
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
