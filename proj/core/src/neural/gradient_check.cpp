#include "hrom/neural/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hrom/errors.hpp"
#include "hrom/numerics/random.hpp"

namespace hrom {

const TensorGradientCheck& GradientCheckReport::at(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  throw ValidationError("gradient check report has no tensor '" + name + "'");
}

GradientCheckReport gradient_check(const std::function<double()>& loss, ParamStore& params,
                                   const GradientCheckOptions& options) {
  if (!(options.h >= 1e-8 && options.h <= 1e-4))
    throw DomainError("gradient_check: h must lie in [1e-8, 1e-4]");
  RandomStream stream(options.seed);
  GradientCheckReport report;
  for (std::size_t s = 0; s < params.size(); ++s) {
    Tensor& t = params[s];
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), t.name) == options.only.end())
      continue;
    std::vector<std::size_t> entries(t.value.size());
    std::iota(entries.begin(), entries.end(), std::size_t{0});
    if (options.max_entries_per_tensor > 0 && entries.size() > options.max_entries_per_tensor) {
      // partial Fisher-Yates
      for (std::size_t i = 0; i < options.max_entries_per_tensor; ++i) {
        const auto j = static_cast<std::size_t>(
            stream.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(entries.size() - 1)));
        std::swap(entries[i], entries[j]);
      }
      entries.resize(options.max_entries_per_tensor);
    }

    TensorGradientCheck check;
    check.name = t.name;
    for (std::size_t e : entries) {
      double& w = t.value.data()[e];
      const double saved = w;
      w = saved + options.h;
      const double up = loss();
      w = saved - options.h;
      const double down = loss();
      w = saved;
      const double numeric = (up - down) / (2.0 * options.h);
      const double analytic = t.grad.data()[e];
      const double abs_err = std::abs(numeric - analytic);
      // Rounding error of the central difference itself; below it the
      // comparison is absolute.
      const double fd_noise = 8.0 * std::numeric_limits<double>::epsilon() *
                              (std::abs(up) + std::abs(down)) / (2.0 * options.h);
      const double denom =
          std::max({std::abs(numeric), std::abs(analytic), options.abs_floor, fd_noise / options.tolerance});
      const double rel = abs_err / denom;
      check.max_abs_error = std::max(check.max_abs_error, abs_err);
      check.max_rel_error = std::max(check.max_rel_error, std::isfinite(rel) ? rel : INFINITY);
      ++check.entries_checked;
    }
    check.flagged = !(check.max_rel_error < options.tolerance);
    report.max_rel_error = std::max(report.max_rel_error, check.max_rel_error);
    report.passed = report.passed && !check.flagged;
    report.tensors.push_back(std::move(check));
  }
  return report;
}

}  // namespace hrom
