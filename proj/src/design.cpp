#include "surrocal/design.hpp"

#include "surrocal/error.hpp"
#include "surrocal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace surrocal {

namespace {

constexpr std::int64_t kExhaustiveLimit = 200'000;

double power_unchecked(const DesignInputs& in, double z, std::int64_t n_human,
                       std::int64_t n_surrogate) {
  const double ess = effective_sample_size(static_cast<double>(n_human),
                                           static_cast<double>(n_surrogate), in.rho);
  const double se = std::sqrt(2.0 * in.sigma_y * in.sigma_y / (ess / 2.0));
  const double d = std::abs(in.effect) / se;
  return stats::normal_cdf(d - z) + stats::normal_cdf(-d - z);
}

struct Candidate {
  std::int64_t n = 0;
  std::int64_t big_n = 0;
  double power = -1.0;
  double cost = 0.0;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.power != b.power) return a.power > b.power;
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.big_n < b.big_n;
}

std::int64_t max_affordable_surrogates(const DesignInputs& in, std::int64_t n) {
  const double remaining = in.budget - static_cast<double>(n) * in.cost_human;
  if (remaining < 0.0) return -1;
  auto big_n = static_cast<std::int64_t>(std::floor(remaining / in.cost_surrogate));
  while (big_n > 0 &&
         static_cast<double>(n) * in.cost_human + static_cast<double>(big_n) * in.cost_surrogate >
             in.budget) {
    --big_n;
  }
  return big_n;
}

// Best candidate for a fixed human count: power is nondecreasing in N, so the
// largest affordable N maximizes it and the smallest N reaching that power
// minimizes cost.
Candidate best_for_humans(const DesignInputs& in, double z, std::int64_t n) {
  Candidate c;
  c.n = n;
  const std::int64_t top = max_affordable_surrogates(in, n);
  if (top < 0) return c;
  const double target = power_unchecked(in, z, n, top);
  std::int64_t lo = 0;
  std::int64_t hi = top;
  if (top > 0 && power_unchecked(in, z, n, top - 1) < target) lo = top;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (power_unchecked(in, z, n, mid) >= target) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  c.big_n = lo;
  c.power = power_unchecked(in, z, n, lo);
  c.cost = static_cast<double>(n) * in.cost_human + static_cast<double>(lo) * in.cost_surrogate;
  return c;
}

}  // namespace

void validate(const DesignInputs& in) {
  if (!(std::abs(in.rho) <= 1.0)) throw ConfigError("rho must lie in [-1, 1]");
  if (!(in.sigma_y > 0.0) || !std::isfinite(in.sigma_y)) {
    throw ConfigError("sigma_y must be positive and finite");
  }
  if (!std::isfinite(in.effect)) throw ConfigError("effect must be finite");
  stats::check_alpha(in.alpha);
  if (!(in.cost_human > 0.0) || !std::isfinite(in.cost_human)) {
    throw ConfigError("cost_human must be positive and finite");
  }
  if (!(in.cost_surrogate > 0.0) || !std::isfinite(in.cost_surrogate)) {
    throw ConfigError("cost_surrogate must be positive and finite");
  }
  if (!(in.budget > 0.0) || !std::isfinite(in.budget)) {
    throw ConfigError("budget must be positive and finite");
  }
}

double effective_sample_size(double n, double big_n, double rho) {
  if (!(n >= 1.0)) throw ConfigError("effective_sample_size requires n >= 1");
  if (!(big_n >= 0.0)) throw ConfigError("effective_sample_size requires N >= 0");
  if (!(std::abs(rho) <= 1.0)) throw ConfigError("effective_sample_size requires |rho| <= 1");
  if (big_n == 0.0 || rho == 0.0) return n;
  return n / (1.0 - rho * rho * big_n / (big_n + n));
}

double power_two_arm(const DesignInputs& in, std::int64_t n_human, std::int64_t n_surrogate) {
  validate(in);
  if (n_human < 2) {
    throw ConfigError("power_two_arm requires at least one human per arm (n_human >= 2)");
  }
  if (n_surrogate < 0) throw ConfigError("n_surrogate must be nonnegative");
  return power_unchecked(in, stats::two_sided_z(in.alpha), n_human, n_surrogate);
}

DesignPlan allocate_budget(const DesignInputs& in) {
  validate(in);
  if (in.budget < 2.0 * in.cost_human) {
    throw ConfigError("budget " + std::to_string(in.budget) +
                      " cannot buy one human per arm (needs " +
                      std::to_string(2.0 * in.cost_human) + ")");
  }
  const auto n_max = static_cast<std::int64_t>(std::floor(in.budget / in.cost_human));
  const double z = stats::two_sided_z(in.alpha);
  Candidate best;
  auto consider = [&](std::int64_t n) {
    if (n < 2 || n > n_max) return;
    const auto c = best_for_humans(in, z, n);
    if (c.power >= 0.0 && (best.power < 0.0 || better(c, best))) best = c;
  };
  if (n_max <= kExhaustiveLimit) {
    for (std::int64_t n = 2; n <= n_max; ++n) consider(n);
  } else {
    // Coarse pass, then unit steps around the coarse winner.
    const std::int64_t stride = n_max / (kExhaustiveLimit / 4);
    for (std::int64_t n = 2; n <= n_max; n += stride) consider(n);
    consider(n_max);
    const std::int64_t centre = best.n;
    for (std::int64_t n = centre - stride; n <= centre + stride; ++n) consider(n);
  }
  DesignPlan plan;
  plan.n_human = best.n;
  plan.n_surrogate = best.big_n;
  plan.achieved_power = best.power;
  plan.total_cost = best.cost;
  plan.ess = effective_sample_size(static_cast<double>(best.n), static_cast<double>(best.big_n),
                                   in.rho);
  return plan;
}

double pilot_rho(const SharedDataset& pilot) {
  if (pilot.n() < 3) throw AssumptionError("pilot correlation requires at least 3 rows");
  const double vy = stats::variance(pilot.y);
  const double vh = stats::variance(pilot.yhat);
  if (!(vy > 0.0 && vh > 0.0)) {
    throw AssumptionError("pilot correlation requires nonzero variance in y and yhat");
  }
  return std::clamp(stats::correlation(pilot.y, pilot.yhat), -1.0, 1.0);
}

}  // namespace surrocal
