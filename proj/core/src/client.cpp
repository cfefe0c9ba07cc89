#include "fedsuplinucb/client.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace fedsup {
namespace {

void check_layer(const ClientState& state, int layer) {
  if (layer < 0 || layer >= state.num_layers()) {
    throw std::out_of_range("layer " + std::to_string(layer) +
                            " outside [0, " +
                            std::to_string(state.num_layers()) + ")");
  }
}

void check_weight(double w, const char* what) {
  if (!std::isfinite(w) || !(w > 0.0)) {
    throw std::invalid_argument(std::string(what) + " must be positive");
  }
}

// Estimates for the listed arms at one layer, from one stats object.
struct LayerEval {
  std::vector<double> rhat;   // aligned with arms
  std::vector<double> width;
  std::vector<double> norm;
};

LayerEval eval_layer(const RidgeStats& stats, double alpha,
                     const std::vector<Vector>& contexts,
                     const std::vector<int>& arms) {
  LayerEval out;
  out.rhat.reserve(arms.size());
  out.width.reserve(arms.size());
  out.norm.reserve(arms.size());
  const Vector theta = stats.solve_theta();
  for (int a : arms) {
    const Vector& x = contexts[a];
    out.rhat.push_back(theta.dot(x));
    const double n = stats.weighted_norm(x);
    out.norm.push_back(n);
    out.width.push_back(alpha * n);
  }
  return out;
}

}  // namespace

ClientState::ClientState(int id_, int dim, int num_layers, double lambda)
    : id(id_) {
  if (num_layers < 1) {
    throw std::invalid_argument("client needs at least one layer");
  }
  synced.reserve(num_layers);
  pending.reserve(num_layers);
  for (int s = 0; s < num_layers; ++s) {
    synced.emplace_back(dim, lambda);
    pending.emplace_back(dim);
  }
}

std::vector<int> initial_screen(const std::vector<ArmEstimate>& estimates) {
  if (estimates.empty()) {
    throw std::invalid_argument("initial_screen needs at least one arm");
  }
  double best_lcb = -std::numeric_limits<double>::infinity();
  for (const auto& e : estimates) {
    best_lcb = std::max(best_lcb, e.rhat - e.width);
  }
  std::vector<int> kept;
  for (int a = 0; a < static_cast<int>(estimates.size()); ++a) {
    if (estimates[a].rhat + estimates[a].width >= best_lcb) kept.push_back(a);
  }
  return kept;
}

std::vector<int> layer_filter(const std::vector<int>& candidates,
                              const std::vector<double>& rhat,
                              double width_bar) {
  if (candidates.empty()) {
    throw std::invalid_argument("layer_filter needs a nonempty candidate set");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (int a : candidates) best = std::max(best, rhat.at(a));
  std::vector<int> kept;
  for (int a : candidates) {
    if (rhat.at(a) >= best - 2.0 * width_bar) kept.push_back(a);
  }
  return kept;
}

SelectionResult slucb_select(const ClientState& state,
                             const LayerSchedule& schedule,
                             const std::vector<Vector>& contexts,
                             UpdateMode mode) {
  if (contexts.empty()) {
    throw std::invalid_argument("selection needs at least one context");
  }
  if (state.num_layers() != schedule.num_layers()) {
    throw std::invalid_argument(
        "client has " + std::to_string(state.num_layers()) +
        " layers, schedule wants " + std::to_string(schedule.num_layers()));
  }

  const int K = static_cast<int>(contexts.size());
  const int S = schedule.S;

  // Fresh mode materializes synced+pending per layer, on demand; a layer with
  // nothing pending prices identically from synced alone.
  std::vector<std::optional<RidgeStats>> fresh(mode == UpdateMode::fresh
                                                   ? state.num_layers()
                                                   : 0);
  auto stats_at = [&](int s) -> const RidgeStats& {
    if (mode == UpdateMode::lazy || state.pending[s].zero()) {
      return state.synced[s];
    }
    if (!fresh[s]) {
      fresh[s] = state.synced[s];
      fresh[s]->merge(state.pending[s]);
    }
    return *fresh[s];
  };

  SelectionResult result;

  std::vector<int> all_arms(K);
  for (int a = 0; a < K; ++a) all_arms[a] = a;

  // Layer-0 estimates for every arm feed the optimism screen.
  LayerEval eval = eval_layer(stats_at(0), schedule.alpha[0], contexts, all_arms);
  std::vector<ArmEstimate> est(K);
  for (int a = 0; a < K; ++a) est[a] = {eval.rhat[a], eval.width[a]};
  std::vector<int> cand = initial_screen(est);
  if (static_cast<int>(cand.size()) != K) {
    eval = eval_layer(stats_at(0), schedule.alpha[0], contexts, cand);
  }

  int s = 0;
  while (true) {
    LayerTrace trace;
    trace.layer = s;
    trace.arms = cand;
    trace.rhat = eval.rhat;
    trace.width = eval.width;
    result.candidate_trace.push_back(std::move(trace));

    if (s == S) {
      // Terminal layer: fixed tie-break, lowest arm index.
      const int idx = 0;
      result.action = cand[idx];
      result.layer = s;
      result.width_at_selection = eval.width[idx];
      result.norm_at_selection = eval.norm[idx];
      return result;
    }

    const double w_bar = schedule.width[s];
    int widest = -1;
    double widest_w = w_bar;
    bool all_within = true;
    for (int i = 0; i < static_cast<int>(cand.size()); ++i) {
      if (eval.width[i] > w_bar) {
        all_within = false;
        if (widest < 0 || eval.width[i] > widest_w) {
          widest = i;
          widest_w = eval.width[i];
        }
      }
    }

    if (all_within) {
      std::vector<double> rhat_by_arm(K, 0.0);
      for (int i = 0; i < static_cast<int>(cand.size()); ++i) {
        rhat_by_arm[cand[i]] = eval.rhat[i];
      }
      cand = layer_filter(cand, rhat_by_arm, w_bar);
      ++s;
      eval = eval_layer(stats_at(s), schedule.alpha[s], contexts, cand);
      continue;
    }

    result.action = cand[widest];
    result.layer = s;
    result.width_at_selection = eval.width[widest];
    result.norm_at_selection = eval.norm[widest];
    return result;
  }
}

void slucb_update(ClientState& state, int layer, const Vector& x,
                  double reward) {
  check_layer(state, layer);
  state.pending[layer].accumulate(x, reward, 1.0);
}

void vslucb_update(ClientState& state, int layer, const Vector& x,
                   double reward, double sigma_bar) {
  check_layer(state, layer);
  check_weight(sigma_bar, "sigma_bar");
  state.pending[layer].accumulate(x, reward, 1.0 / (sigma_bar * sigma_bar));
}

void cslucb_update(ClientState& state, int layer, const Vector& x,
                   double reward, double eta) {
  check_layer(state, layer);
  check_weight(eta, "eta");
  if (eta > 1.0) {
    throw std::invalid_argument("eta must lie in (0, 1]");
  }
  state.pending[layer].accumulate(x, reward, eta);
}

}  // namespace fedsup
