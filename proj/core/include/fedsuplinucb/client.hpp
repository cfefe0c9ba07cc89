#pragma once

// Per-client state and the layered elimination subroutine.
//
// Each client keeps S+1 independent ridge regressors: `synced` mirrors what
// the server distributed at the last synchronization, `pending` accumulates
// local observations that have not been shipped yet. Selection walks the
// layers: an initial optimism screen at layer 0 discards arms whose upper
// bound cannot reach the best lower bound, then each layer either descends
// (every candidate width below the layer's acceptance width, candidates
// re-filtered within 2*w_bar of the leader) or stops and plays the widest
// over-threshold candidate. Layer S breaks ties by lowest arm index. The
// observation is credited to the layer where the walk stopped, and only that
// layer.

#include <vector>

#include "fedsuplinucb/linalg.hpp"
#include "fedsuplinucb/schedule.hpp"

namespace fedsup {

struct ClientState {
  int id = 0;
  std::vector<RidgeStats> synced;
  std::vector<DeltaStats> pending;

  ClientState(int id, int dim, int num_layers, double lambda = 1.0);
  int num_layers() const { return static_cast<int>(synced.size()); }
  int dim() const { return synced.empty() ? 0 : synced.front().dim(); }
};

struct ArmEstimate {
  double rhat = 0.0;
  double width = 0.0;
};

// Layer-0 optimism screen: keep arms whose UCB reaches the best LCB.
std::vector<int> initial_screen(const std::vector<ArmEstimate>& estimates);

// Keep candidates within 2*width_bar of the best candidate estimate.
// `rhat` is indexed by arm id.
std::vector<int> layer_filter(const std::vector<int>& candidates,
                              const std::vector<double>& rhat,
                              double width_bar);

enum class UpdateMode { lazy, fresh };

// One visited layer: the candidate set entering it plus the estimates the
// decision was made from (diagnostics and coverage checks read these).
struct LayerTrace {
  int layer = 0;
  std::vector<int> arms;
  std::vector<double> rhat;
  std::vector<double> width;
};

struct SelectionResult {
  int action = 0;
  int layer = 0;
  double width_at_selection = 0.0;
  double norm_at_selection = 0.0;  // width / alpha, reused by reweighting
  std::vector<LayerTrace> candidate_trace;
};

// Lazy mode prices arms from synced statistics alone (asynchronous runs);
// fresh mode folds the pending delta in first (synchronous runs, baseline).
SelectionResult slucb_select(const ClientState& state,
                             const LayerSchedule& schedule,
                             const std::vector<Vector>& contexts,
                             UpdateMode mode);

// Observation landing in `layer`'s pending delta, weight 1.
void slucb_update(ClientState& state, int layer, const Vector& x,
                  double reward);

// Variance-weighted observation, weight 1/sigma_bar^2.
void vslucb_update(ClientState& state, int layer, const Vector& x,
                   double reward, double sigma_bar);

// Distrust-weighted observation, weight eta in (0, 1].
void cslucb_update(ClientState& state, int layer, const Vector& x,
                   double reward, double eta);

}  // namespace fedsup
