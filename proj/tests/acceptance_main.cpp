// Usage: acceptance_suite <fast|full> [criterion ids...]
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance_suite <fast|full> [ids...]\n";
    return 2;
  }
  combwalk::acceptance::Suite suite;
  try {
    suite = combwalk::acceptance::parse_suite(argv[1]);
  } catch (const std::exception& ex) {
    std::cerr << ex.what() << "\n";
    return 2;
  }
  std::vector<int> only;
  for (int i = 2; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const auto results = combwalk::acceptance::run_suite(suite, std::cout, only);
  for (const auto& r : results) {
    if (!r.pass) return 1;
  }
  return 0;
}
