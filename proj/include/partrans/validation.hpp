#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "partrans/grid.hpp"
#include "partrans/kernel.hpp"
#include "partrans/particles.hpp"

namespace partrans {

struct CheckOutcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::string title;
  double runtime_limit = 0.0;  // seconds; exceeding it fails the criterion
  std::function<CheckOutcome()> check;
};

struct CriterionResult {
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

/// The acceptance suite, thresholds pinned.
const std::vector<Criterion>& acceptance_criteria();

/// Runs one criterion, timing it; exceptions count as failures.
CriterionResult run_criterion(const Criterion& c);

/// "PASS name: detail (1.23 s)" or "FAIL ...".
std::string format_result(const CriterionResult& r);

/// Sum over every particle (no cell list) with the minimum-image y distance.
double brute_force_evaluate(const ParticleStore& store, const KernelSpec& kernel, std::span<const double> mass,
                            const DomainSpec& domain, Vec2 p);

/// 2 pi int_0^h zeta(r) r dr by composite Simpson on each polynomial piece.
double kernel_radial_integral(const KernelSpec& kernel, std::size_t panels = 2000);

/// Transverse spread of a grid: max_i max_j |g(i, j) - g(i, 0)|.
double transverse_spread(const ScalarGrid& g);

}  // namespace partrans
