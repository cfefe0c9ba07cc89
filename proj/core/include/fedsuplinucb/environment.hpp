#pragma once

// Reward environments.
//
// Synthetic runs draw i.i.d. unit-sphere contexts and reward theta'x plus
// noise; dataset-backed runs replay contexts (and optionally realized
// rewards) from a CSV stream. An adversary, when attached, edits the observed
// reward after noise, under a hard total budget sum_t |c_t| <= Cp.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fedsuplinucb/linalg.hpp"
#include "fedsuplinucb/rng.hpp"

namespace fedsup {

enum class NoiseKind { none, gaussian, bounded_hetero };

// Per-round noise scale for heteroscedastic runs; values cycle by round.
struct SigmaSchedule {
  std::vector<double> values{0.0};

  static SigmaSchedule constant(double sigma) { return {{sigma}}; }
  double at(long t) const {  // t is 1-based
    return values[static_cast<std::size_t>((t - 1) % static_cast<long>(values.size()))];
  }
};

struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double sigma = 0.0;       // gaussian std
  double R = 1.0;           // hard bound on sigma_t (bounded_hetero)
  SigmaSchedule schedule;   // bounded_hetero scales

  static NoiseModel none();
  static NoiseModel gaussian(double sigma);
  // Two-point +-sigma_t noise with sigma_t <= R enforced at construction.
  static NoiseModel bounded_hetero(double R, SigmaSchedule schedule);
};

enum class CorruptionStrategy { sign_flip_prefix, targeted_best_arm, custom };

// Desired corruption as a function of (round, clean observed reward, whether
// the pulled arm was the true best). The adversary clips it to the remaining
// budget.
using CorruptionFn = std::function<double(long, double, bool)>;

class CorruptionAdversary {
 public:
  CorruptionAdversary(CorruptionStrategy strategy, double budget,
                      CorruptionFn custom = {});

  double budget() const { return budget_; }
  double spent() const { return spent_; }

  // Additive corruption for this round; |returned| never overdraws budget.
  double corrupt(long t, double clean_reward, bool chose_best);

 private:
  CorruptionStrategy strategy_;
  double budget_ = 0.0;
  double spent_ = 0.0;
  CorruptionFn custom_;
};

struct RewardSample {
  double observed = 0.0;   // what the learner sees
  double true_mean = 0.0;  // theta'x (NaN for realized-reward streams)
  double noise = 0.0;
  double corruption = 0.0;
  double sigma_t = 0.0;    // meaningful when has_sigma
  bool has_sigma = false;
};

struct RoundContexts {
  std::vector<Vector> arms;
  std::vector<double> realized;  // optional per-arm rewards from file
  bool has_realized = false;
};

// Parsed CSV context stream. Expected header: round,arm,x_1,...,x_d[,reward]
// with rounds 1..N and arms 0..K-1, both contiguous. Rows whose context norm
// exceeds 1 are rescaled onto the sphere and counted.
class ContextStream {
 public:
  int d = 0;
  int K = 0;
  bool has_rewards = false;
  long renormalized_rows = 0;
  std::vector<RoundContexts> rounds;

  long num_rounds() const { return static_cast<long>(rounds.size()); }
  const RoundContexts& at(long t) const;  // 1-based, throws past the end
};

ContextStream load_context_stream(const std::filesystem::path& path);

// Uniform direction on the unit sphere, scaled; used for theta draws.
Vector sample_sphere(int d, RngStream& rng, double scale = 1.0);

class LinearEnv {
 public:
  // theta'x rewards on synthetic sphere contexts.
  static LinearEnv synthetic(Vector theta, NoiseModel noise);
  // File contexts, rewards still synthesized from theta.
  static LinearEnv with_stream(Vector theta, NoiseModel noise, ContextStream stream);
  // File contexts and realized rewards; no theta, regret is not defined.
  static LinearEnv from_realized(ContextStream stream);

  bool has_theta() const { return theta_.has_value(); }
  const Vector& theta() const;
  int dim() const { return dim_; }
  const NoiseModel& noise() const { return noise_; }
  bool uses_realized() const { return use_realized_; }
  const ContextStream* stream() const { return stream_ ? &*stream_ : nullptr; }

  void attach_adversary(CorruptionAdversary adversary);
  const std::optional<CorruptionAdversary>& adversary_template() const {
    return adversary_;
  }

  // K contexts for pull index t (1-based). Synthetic mode draws from rng;
  // stream mode replays and errors past the end.
  std::vector<Vector> gen_contexts(long t, int K, RngStream& rng) const;

  // Observed reward for playing context x at pull t. `adversary` is the
  // run-local mutable copy (nullptr for corruption-free runs).
  RewardSample reward(const Vector& x, long t, RngStream& rng,
                      CorruptionAdversary* adversary, bool chose_best) const;

  // Realized reward replay (streams with a reward column).
  RewardSample realized_reward(long t, int arm,
                               CorruptionAdversary* adversary) const;

  // Exact argmax of theta'x, ties to the lowest index.
  std::pair<int, double> best_arm(const std::vector<Vector>& contexts) const;

 private:
  LinearEnv() = default;

  std::optional<Vector> theta_;
  int dim_ = 0;
  NoiseModel noise_;
  std::optional<ContextStream> stream_;
  bool use_realized_ = false;
  std::optional<CorruptionAdversary> adversary_;
};

}  // namespace fedsup
