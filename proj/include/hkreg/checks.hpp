#pragma once

#include <string>
#include <vector>

namespace hkreg {

struct CheckResult {
  std::string name;
  double value = 0.0;      // measured error (or 0/1 for exact checks)
  double threshold = 0.0;  // pass iff value <= threshold
  bool passed = false;
};

struct KernelCheckOptions {
  // Constant added to every kernel value the checks evaluate; nonzero only
  // to confirm that the checks catch a broken kernel.
  double kernel_offset = 0.0;
};

/// Heat-kernel identities (cross-representation, normalization, semigroup,
/// symmetry, positivity, rotation invariance) on the circle, sphere and
/// torus, plus the metric axioms of d_q and d_inf on random circle paths.
std::vector<CheckResult> run_kernel_checks(KernelCheckOptions options = {});

// Individual checks, exposed for tests and the acceptance suite.
CheckResult check_circle_cross_representation(double offset = 0.0);
CheckResult check_normalization(const std::string& manifold, double offset = 0.0);
CheckResult check_semigroup(const std::string& manifold, double offset = 0.0);
CheckResult check_symmetry(const std::string& manifold, double offset = 0.0);
CheckResult check_positivity(const std::string& manifold, double offset = 0.0);
CheckResult check_circle_rotation_invariance(double offset = 0.0);
CheckResult check_metric_axioms();
CheckResult check_power_mean_monotonicity();

}  // namespace hkreg
