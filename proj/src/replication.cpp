#include "surrocal/error.hpp"
#include "surrocal/rng.hpp"
#include "surrocal/simlab.hpp"
#include "surrocal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace surrocal {

namespace {

template <typename... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <typename... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

DgpConfig with_seed(DgpConfig dgp, std::uint64_t seed) {
  std::visit([seed](auto& c) { c.seed = seed; }, dgp);
  return dgp;
}

[[noreturn]] void not_applicable(const EstimatorSpec& spec, const char* dgp) {
  throw AssumptionError("target '" + std::string(to_string(spec.target)) +
                        "' does not apply to the " + dgp + " DGP");
}

EstimateReport estimate_tabular(const SharedDataset& shared, const SurrogateDataset& surrogate,
                                const EstimatorSpec& spec, std::uint64_t seed) {
  MeanOptions options = spec.options;
  options.seed = splitmix64(spec.options.seed ^ seed);
  switch (spec.target) {
    case Target::mean: return estimate_mean(spec.method, shared, surrogate, options, spec.alpha);
    case Target::diff_in_means:
      return diff_in_means(shared, surrogate, spec.method, options, spec.alpha);
    case Target::ols_coefficient: {
      std::vector<EstimateReport> reports;
      switch (spec.method) {
        case Method::human_only: reports = human_ols(shared, spec.alpha); break;
        case Method::naive_surrogate: reports = naive_surrogate_ols(surrogate, spec.alpha); break;
        case Method::ppi: reports = ppi_ols(shared, surrogate, options.lambda, spec.alpha); break;
        default:
          throw AssumptionError("method '" + std::string(to_string(spec.method)) +
                                "' has no regression form; use human_only, naive_surrogate or ppi");
      }
      if (spec.coefficient < 0 || spec.coefficient >= static_cast<int>(reports.size())) {
        throw ConfigError("coefficient index " + std::to_string(spec.coefficient) +
                          " out of range");
      }
      return reports[static_cast<std::size_t>(spec.coefficient)];
    }
    case Target::twin_ate:
    case Target::tisa_gap: break;
  }
  throw AssumptionError("target '" + std::string(to_string(spec.target)) +
                        "' needs the twin DGP");
}

}  // namespace

std::string_view to_string(Target target) {
  switch (target) {
    case Target::mean: return "mean";
    case Target::diff_in_means: return "diff_in_means";
    case Target::ols_coefficient: return "ols_coefficient";
    case Target::twin_ate: return "twin_ate";
    case Target::tisa_gap: return "tisa_gap";
  }
  return "mean";
}

Target target_from_string(std::string_view name) {
  for (auto t : {Target::mean, Target::diff_in_means, Target::ols_coefficient, Target::twin_ate,
                 Target::tisa_gap}) {
    if (to_string(t) == name) return t;
  }
  if (name == "diff") return Target::diff_in_means;
  if (name == "ols") return Target::ols_coefficient;
  throw ConfigError("unknown estimation target '" + std::string(name) + "'");
}

double true_value(const DgpConfig& dgp, const EstimatorSpec& spec) {
  return std::visit(
      Overloaded{
          [&](const MeanDGPConfig& c) -> double {
            switch (spec.target) {
              case Target::mean: return c.mu;
              case Target::diff_in_means: return 0.0;
              case Target::ols_coefficient:
                // y is independent of (x_1, z): intercept mu, slopes zero.
                return spec.coefficient == 0 ? c.mu : 0.0;
              default: not_applicable(spec, "mean");
            }
          },
          [&](const OlsBiasConfig& c) -> double {
            switch (spec.target) {
              case Target::mean: return c.beta0 + 0.5 * c.beta1;
              case Target::diff_in_means: return c.beta1;
              case Target::ols_coefficient: return spec.coefficient == 0 ? c.beta0 : c.beta1;
              default: not_applicable(spec, "ols_bias");
            }
          },
          [&](const BinaryDGPConfig& c) -> double {
            const double p1 = stats::normal_cdf(c.arm_shift);
            const double p0 = stats::normal_cdf(-c.arm_shift);
            switch (spec.target) {
              case Target::mean: return 0.5 * (p1 + p0);
              case Target::diff_in_means: return p1 - p0;
              case Target::ols_coefficient: return spec.coefficient == 0 ? p0 : p1 - p0;
              default: not_applicable(spec, "binary");
            }
          },
          [&](const TwinDGPConfig& c) -> double {
            switch (spec.target) {
              case Target::twin_ate: return c.tau;
              case Target::tisa_gap:
                return c.interaction ? c.eta_mean * (c.beta1 - c.beta0) : c.beta1 - c.beta0;
              default: not_applicable(spec, "twin");
            }
          },
      },
      dgp);
}

EstimateReport run_once(const DgpConfig& dgp, const EstimatorSpec& spec, std::uint64_t seed) {
  const DgpConfig seeded = with_seed(dgp, seed);
  return std::visit(
      Overloaded{
          [&](const MeanDGPConfig& c) {
            const auto s = gen_mean_dgp(c);
            return estimate_tabular(s.shared, s.surrogate, spec, seed);
          },
          [&](const OlsBiasConfig& c) {
            const auto s = gen_ols_bias_dgp(c);
            return estimate_tabular(s.shared, s.surrogate, spec, seed);
          },
          [&](const BinaryDGPConfig& c) {
            const auto s = gen_binary_dgp(c);
            return estimate_tabular(s.shared, s.surrogate, spec, seed);
          },
          [&](const TwinDGPConfig& c) {
            const auto s = gen_twin_dgp(c);
            if (spec.target == Target::twin_ate) return twin_ate(s.twin, spec.alpha);
            if (spec.target == Target::tisa_gap) return tisa_gap(s.joint(), spec.alpha);
            not_applicable(spec, "twin");
          },
      },
      seeded);
}

std::vector<EstimateReport> replicate(const DgpConfig& dgp, const EstimatorSpec& spec,
                                      std::int64_t replications, std::uint64_t master_seed,
                                      int workers) {
  if (replications < 1) throw ConfigError("replication count must be at least 1");
  if (workers < 1) throw ConfigError("worker count must be at least 1");
  // Validate target/DGP compatibility before fanning out.
  (void)true_value(dgp, spec);
  const auto count = static_cast<std::size_t>(replications);
  std::vector<EstimateReport> reports(count);
  std::vector<std::exception_ptr> failures(count);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t r = first; r < count; r += stride) {
      try {
        reports[r] = run_once(dgp, spec, replication_seed(master_seed, r));
      } catch (...) {
        failures[r] = std::current_exception();
        return;
      }
    }
  };
  const auto thread_count = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  if (thread_count <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < thread_count; ++w) pool.emplace_back(work, w, thread_count);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return reports;
}

ReplicationSummary summarize(const std::vector<EstimateReport>& reports, double truth,
                             std::string method, std::string target) {
  if (reports.empty()) throw ConfigError("cannot summarize zero replications");
  const auto count = reports.size();
  const double r = static_cast<double>(count);
  std::vector<double> estimates(count);
  std::vector<double> widths(count);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < count; ++i) {
    estimates[i] = reports[i].estimate;
    widths[i] = reports[i].ci_high - reports[i].ci_low;
    if (reports[i].ci_low <= truth && truth <= reports[i].ci_high) ++covered;
  }
  ReplicationSummary s;
  s.method = std::move(method);
  s.target = std::move(target);
  s.replications = static_cast<std::int64_t>(count);
  s.truth = truth;
  s.mean_estimate = stats::pairwise_sum(estimates) / r;
  s.mean_bias = s.mean_estimate - truth;
  s.empirical_coverage = static_cast<double>(covered) / r;
  s.mean_ci_width = stats::pairwise_sum(widths) / r;
  if (count > 1) {
    std::vector<double> sq(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double d = estimates[i] - s.mean_estimate;
      sq[i] = d * d;
    }
    s.variance = stats::pairwise_sum(sq) / (r - 1.0);
  }
  s.mc_std_error = std::sqrt(s.variance / r);
  return s;
}

ReplicationSummary run_replications(const DgpConfig& dgp, const EstimatorSpec& spec,
                                    std::int64_t replications, std::uint64_t master_seed,
                                    int workers) {
  const double truth = true_value(dgp, spec);
  const auto reports = replicate(dgp, spec, replications, master_seed, workers);
  return summarize(reports, truth, std::string(to_string(reports.front().method)),
                   std::string(to_string(spec.target)));
}

}  // namespace surrocal
