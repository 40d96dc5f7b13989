#include <iostream>
#include <string>

#include "bvx/acceptance.hpp"

int main(int argc, char** argv) {
  bvx::AcceptanceOptions opt;
  opt.out = &std::cout;
  if (argc > 1) opt.work_dir = argv[1];
  for (int i = 2; i < argc; ++i) opt.only.push_back(std::stoi(argv[i]));
  const auto results = bvx::run_acceptance(opt);
  int failed = 0;
  for (const auto& r : results) failed += !r.pass;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
