#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "crowdasm/domain.hpp"
#include "crowdasm/error.hpp"

namespace crowdasm {

struct DemandParams {
  double alpha1 = 0.0;
  double alpha2 = -0.5;
  double alpha3 = 0.25;
  DemandForm form = DemandForm::exact_eq5;

  static DemandParams from(const MarketConfig& cfg) {
    return {cfg.alpha1, cfg.alpha2, cfg.alpha3, cfg.demand_form};
  }
};

struct DemandDraw {
  double expected = 0.0;
  int realized = 0;
};

/// Linearized demand with its clamp flag; `raw` is the value before clamping at zero.
struct LinearizedDemand {
  double value = 0.0;
  double raw = 0.0;
  bool clamped = false;
};

namespace detail {
inline void check_demand_domain(double p, double r_tilde, int n_plus) {
  if (!(p > 0.0) || !std::isfinite(p)) throw Error(ErrorCode::DomainError, "price must be > 0");
  if (!(r_tilde > 0.0 && r_tilde < 1.0)) throw Error(ErrorCode::DomainError, "reliability must lie in (0,1)");
  if (n_plus < 1) throw Error(ErrorCode::DomainError, "positive rating count must be >= 1");
}
}  // namespace detail

/// Log-linear demand: exp(a1) * r^a2 * n_plus^a3 * p.
inline double expected_demand(double p, double r_tilde, int n_plus, const DemandParams& params) {
  detail::check_demand_domain(p, r_tilde, n_plus);
  return std::exp(params.alpha1 + params.alpha2 * std::log(r_tilde) +
                  params.alpha3 * std::log(static_cast<double>(n_plus))) *
         p;
}

inline double beta_coefficient(int n_plus, const DemandParams& params) {
  return params.alpha2 * params.alpha3 * static_cast<double>(n_plus) * std::exp(params.alpha1);
}

/// beta * r * p with beta = a2 * a3 * n_plus * exp(a1). Negative values clamp to zero.
inline LinearizedDemand linearized_demand(double p, double r_tilde, int n_plus,
                                          const DemandParams& params) {
  detail::check_demand_domain(p, r_tilde, n_plus);
  LinearizedDemand out;
  out.raw = beta_coefficient(n_plus, params) * r_tilde * p;
  out.clamped = out.raw < 0.0;
  out.value = out.clamped ? 0.0 : out.raw;
  return out;
}

/// Dispatches on params.form; increments `clamp_count` whenever the linearized form clamps.
inline double demand_for(double p, double r_tilde, int n_plus, const DemandParams& params,
                         long& clamp_count) {
  if (params.form == DemandForm::exact_eq5) return expected_demand(p, r_tilde, n_plus, params);
  const auto lin = linearized_demand(p, r_tilde, n_plus, params);
  if (lin.clamped) ++clamp_count;
  return lin.value;
}

template <class Rng>
int realize_demand(double expected, int cap, DemandMode mode, Rng& rng) {
  if (!(expected > 0.0) || cap <= 0) return 0;
  long value = 0;
  if (mode == DemandMode::deterministic) {
    value = static_cast<long>(std::floor(expected + 0.5));
  } else {
    std::poisson_distribution<long> dist(expected);
    value = dist(rng);
  }
  return static_cast<int>(std::clamp<long>(value, 0, cap));
}

}  // namespace crowdasm
