#pragma once

// Run configuration and the per-layer elimination schedule.
//
// A schedule fixes, ahead of time, the number of elimination layers S, the
// acceptance widths w_bar[s] that gate descent from layer s, and the
// confidence multipliers alpha[s]. Layer 0 uses a self-normalized
// (dimension-dependent) multiplier because its pulls are adaptively chosen;
// deeper layers get the tighter fixed-design multiplier. The three variants
// share the same elimination loop and differ only in these constants and in
// how observations are weighted.

#include <cmath>
#include <string>
#include <vector>

namespace fedsup {

enum class Variant { standard, variance_adaptive, corruption_robust };

std::string to_string(Variant v);

struct AlgoConfig {
  int d = 10;           // context dimension
  int K = 10;           // arms per round
  int M = 5;            // clients
  long T = 20000;       // total arm pulls across all clients
  double delta = 0.05;  // confidence level

  Variant variant = Variant::standard;

  // Communication thresholds. NaN means "derive the theory default at run
  // time": C = 1/M^2, D = Tc*log(Tc)/(d^2*M) with Tc = T/M.
  double C = std::nan("");
  double D = std::nan("");

  double R = 1.0;            // variance scale bound (variance runs)
  double Cp = 0.0;           // assumed total corruption budget (robust runs)
  double ridge_lambda = 1.0; // Gram regularizer
};

struct LayerSchedule {
  int S = 1;                     // deepest layer index; layers are 0..S
  std::vector<double> width;     // w_bar[s], halving per layer
  std::vector<double> alpha;     // confidence multiplier per layer
  Variant variant = Variant::standard;

  int num_layers() const { return S + 1; }
};

// Derives S, widths and alphas from the configuration. Throws
// std::invalid_argument on out-of-range fields.
LayerSchedule build_schedule(const AlgoConfig& cfg);

// Effective communication thresholds (theory defaults when unset).
double resolve_async_threshold(const AlgoConfig& cfg);
double resolve_sync_threshold(const AlgoConfig& cfg, long rounds_per_client);

// Variance floor parameters: sigma_bar = max(sigma_t, rho, gamma*sqrt(norm)).
struct SigmaBarParams {
  double rho = 0.0;
  double gamma = 0.0;
};
SigmaBarParams sigma_bar_params(const AlgoConfig& cfg);
double sigma_bar(double sigma_t, const SigmaBarParams& p, double width_norm);

// Distrust scale for robust runs: sqrt(d)/Cp, +infinity when Cp == 0 so the
// weight below degenerates to 1 and the run matches the standard one.
double corruption_gamma(const AlgoConfig& cfg);
double corruption_weight(double gamma, double width_norm);

}  // namespace fedsup
