// Acceptance suite: one PASS/FAIL line per criterion; nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <iostream>

#include "spiralflow.hpp"

int main() {
  spiralflow::AcceptanceSuite suite;
  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  const auto results = suite.run_all([&](const spiralflow::CriterionResult& r) {
    if (!r.passed) ++failed;
    std::cout << spiralflow::format_criterion(r) << std::endl;
  });
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%zu criteria, %d failed (%.1f s)\n", results.size(), failed, seconds);
  return failed == 0 ? 0 : 1;
}
