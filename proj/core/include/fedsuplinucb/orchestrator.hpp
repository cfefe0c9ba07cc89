#pragma once

// Experiment drivers: arrival patterns, the asynchronous and synchronous
// federated loops, the reweighted variants and the single-player baseline.
//
// Determinism contract: a run is a pure function of (config, seed, env spec,
// pattern). Randomness is split into named substreams per purpose and per
// client: contexts/<i>, noise/<i>, arrivals, theta. Client i therefore sees
// the same context sequence whatever the arrival pattern or algorithm, which
// is what makes paired comparisons across algorithms meaningful.

#include <cstdint>
#include <functional>
#include <vector>

#include "fedsuplinucb/client.hpp"
#include "fedsuplinucb/environment.hpp"
#include "fedsuplinucb/metrics.hpp"
#include "fedsuplinucb/protocol.hpp"
#include "fedsuplinucb/schedule.hpp"

namespace fedsup {

enum class ArrivalKind { random, round_robin, click_leave, custom };

std::string to_string(ArrivalKind k);

struct ArrivalPattern {
  ArrivalKind kind = ArrivalKind::round_robin;
  int M = 1;
  std::vector<int> schedule;  // schedule[t-1] = active client at pull t
};

// Partitions T pulls over M clients. round_robin cycles t mod M; click_leave
// serves clients in contiguous blocks (client 0 first); random shuffles the
// balanced multiset. When M does not divide T the earlier-indexed clients
// take the extra slots.
ArrivalPattern make_arrivals(ArrivalKind kind, int M, long T, RngStream& rng);
ArrivalPattern custom_arrivals(std::vector<int> schedule, int M);

// Per-round test/diagnostic hook.
struct RoundObservation {
  long round = 0;        // protocol round
  long pull = 0;         // global pull index
  int client = 0;
  const std::vector<Vector>& contexts;
  const SelectionResult& selection;
  const RewardSample& sample;
  double update_weight = 1.0;
  int best_arm = -1;
  double best_mean = 0.0;
  bool comm_fired = false;
};
using RoundObserver = std::function<void(const RoundObservation&)>;

struct RunOptions {
  std::uint64_t seed = 1;
  // Offsets the per-client stream tags; lets a single-client run replay the
  // streams client j would see inside an M-client run.
  int stream_client_base = 0;
  MessageLog* messages = nullptr;
  RoundObserver observer;
};

// One active client per pull, lazy pricing, determinant-ratio upload trigger;
// a fired trigger synchronizes every layer of that client.
ExperimentLog run_async(const AlgoConfig& cfg, const LinearEnv& env,
                        const ArrivalPattern& pattern, const RunOptions& opts);

// All M clients pull every round on fresh statistics; layers whose staleness-
// weighted determinant ratio passes D are synchronized across all clients at
// the end of the round. cfg.T counts total pulls, so rounds = T / M.
ExperimentLog run_sync(const AlgoConfig& cfg, const LinearEnv& env,
                       const RunOptions& opts);

// Async loop with variance-weighted regression; requires a bounded_hetero
// environment (the variance channel).
ExperimentLog run_variance_adaptive(const AlgoConfig& cfg, const LinearEnv& env,
                                    const ArrivalPattern& pattern,
                                    const RunOptions& opts);

// Async loop with distrust weights; with cfg.Cp == 0 it reproduces run_async
// pull for pull.
ExperimentLog run_corruption_robust(const AlgoConfig& cfg, const LinearEnv& env,
                                    const ArrivalPattern& pattern,
                                    const RunOptions& opts);

// Single player, fresh statistics, no communication.
ExperimentLog run_baseline_suplinucb(const AlgoConfig& cfg, const LinearEnv& env,
                                     const RunOptions& opts);

}  // namespace fedsup
