#include "fedsuplinucb/schedule.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace fedsup {
namespace {

void validate(const AlgoConfig& cfg) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("config: " + what);
  };
  if (cfg.d < 1) fail("d must be >= 1");
  if (cfg.K < 1) fail("K must be >= 1");
  if (cfg.M < 1) fail("M must be >= 1");
  if (cfg.T < 1) fail("T must be >= 1");
  if (!(cfg.delta > 0.0) || !(cfg.delta < 1.0)) fail("delta must lie in (0, 1)");
  if (!(cfg.ridge_lambda > 0.0) || !std::isfinite(cfg.ridge_lambda)) {
    fail("ridge_lambda must be positive");
  }
  if (cfg.variant == Variant::variance_adaptive &&
      (!(cfg.R > 0.0) || !std::isfinite(cfg.R))) {
    fail("R must be positive for variance-adaptive runs");
  }
  if (cfg.variant == Variant::corruption_robust &&
      (cfg.Cp < 0.0 || !std::isfinite(cfg.Cp))) {
    fail("Cp must be finite and >= 0");
  }
  if (!std::isnan(cfg.C) && cfg.C < 0.0) fail("C must be >= 0");
  if (!std::isnan(cfg.D) && cfg.D < 0.0) fail("D must be >= 0");
}

int clamp_layers(double raw) {
  const int s = static_cast<int>(std::ceil(raw));
  return std::max(1, s);
}

// Fixed-design multiplier shared by layers >= 1. The log d factor counts
// layers and is floored at 1 so d <= 2 stays well defined (S is likewise
// clamped to at least one layer).
double deep_alpha(const AlgoConfig& cfg) {
  const double layers = std::max(std::log(static_cast<double>(cfg.d)), 1.0);
  const double arg = 2.0 * static_cast<double>(cfg.K) * cfg.M *
                     static_cast<double>(cfg.T) * layers / cfg.delta;
  return 1.0 + std::sqrt(2.0 * std::log(arg));
}

// Self-normalized multiplier for layer 0.
double base_alpha(const AlgoConfig& cfg) {
  const double arg = 2.0 * cfg.M * cfg.M * static_cast<double>(cfg.T) / cfg.delta;
  return 1.0 + std::sqrt(cfg.d * std::log(arg));
}

// Bernstein-style radius for variance-weighted regression, evaluated at the
// horizon with sigma^2 = R^2, the per-step max term bounded by R, eps = R/T
// and unit context norms.
double variance_alpha0(const AlgoConfig& cfg) {
  const double T = static_cast<double>(cfg.T);
  const double R = cfg.R;
  const double d = static_cast<double>(cfg.d);
  const double lt = std::log(32.0 * (std::log(T) + 1.0) * T * T / cfg.delta);
  const double beta = 12.0 * std::sqrt(R * R * d * std::log(1.0 + T / d) * lt) +
                      24.0 * lt * R + 6.0 * lt * (R / T);
  return 1.0 + beta;
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::standard: return "standard";
    case Variant::variance_adaptive: return "variance_adaptive";
    case Variant::corruption_robust: return "corruption_robust";
  }
  return "unknown";
}

LayerSchedule build_schedule(const AlgoConfig& cfg) {
  validate(cfg);
  LayerSchedule sched;
  sched.variant = cfg.variant;

  const double d = static_cast<double>(cfg.d);
  const double T = static_cast<double>(cfg.T);

  double w0 = 0.0;
  if (cfg.variant == Variant::variance_adaptive) {
    sched.S = clamp_layers(std::log2(cfg.R) + std::log2(T));
    w0 = d * cfg.R * cfg.R;
  } else {
    sched.S = clamp_layers(std::log2(d));
    w0 = std::pow(d, 1.5) / std::sqrt(T);
  }

  sched.width.resize(sched.S + 1);
  for (int s = 0; s <= sched.S; ++s) {
    sched.width[s] = std::ldexp(w0, -s);  // w0 * 2^-s
  }

  sched.alpha.assign(sched.S + 1, deep_alpha(cfg));
  sched.alpha[0] = cfg.variant == Variant::variance_adaptive
                       ? variance_alpha0(cfg)
                       : base_alpha(cfg);

  if (cfg.variant == Variant::corruption_robust && cfg.Cp > 0.0) {
    // gamma * Cp == sqrt(d): the price of distrust-weighting is one flat
    // sqrt(d) bump on every layer.
    for (double& a : sched.alpha) a += std::sqrt(d);
  }
  return sched;
}

double resolve_async_threshold(const AlgoConfig& cfg) {
  if (std::isnan(cfg.C)) {
    return 1.0 / (static_cast<double>(cfg.M) * cfg.M);
  }
  if (cfg.C < 0.0) throw std::invalid_argument("config: C must be >= 0");
  return cfg.C;
}

double resolve_sync_threshold(const AlgoConfig& cfg, long rounds_per_client) {
  if (rounds_per_client < 1) {
    throw std::invalid_argument("config: rounds per client must be >= 1");
  }
  if (std::isnan(cfg.D)) {
    const double tc = static_cast<double>(rounds_per_client);
    return tc * std::log(tc) / (static_cast<double>(cfg.d) * cfg.d * cfg.M);
  }
  if (cfg.D < 0.0) throw std::invalid_argument("config: D must be >= 0");
  return cfg.D;
}

SigmaBarParams sigma_bar_params(const AlgoConfig& cfg) {
  SigmaBarParams p;
  p.rho = 1.0 / std::sqrt(static_cast<double>(cfg.T));
  p.gamma = std::sqrt(cfg.R) / std::pow(static_cast<double>(cfg.d), 0.25);
  return p;
}

double sigma_bar(double sigma_t, const SigmaBarParams& p, double width_norm) {
  if (!(sigma_t >= 0.0) || !std::isfinite(sigma_t)) {
    throw std::invalid_argument("sigma_t must be finite and >= 0");
  }
  if (!(width_norm >= 0.0) || !std::isfinite(width_norm)) {
    throw std::invalid_argument("width norm must be finite and >= 0");
  }
  return std::max({sigma_t, p.rho, p.gamma * std::sqrt(width_norm)});
}

double corruption_gamma(const AlgoConfig& cfg) {
  if (cfg.Cp < 0.0) throw std::invalid_argument("config: Cp must be >= 0");
  if (cfg.Cp == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(static_cast<double>(cfg.d)) / cfg.Cp;
}

double corruption_weight(double gamma, double width_norm) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(width_norm >= 0.0) || !std::isfinite(width_norm)) {
    throw std::invalid_argument("width norm must be finite and >= 0");
  }
  if (width_norm == 0.0) return 1.0;
  return std::min(1.0, gamma / width_norm);
}

}  // namespace fedsup
