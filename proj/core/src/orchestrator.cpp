#include "fedsuplinucb/orchestrator.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fedsup {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_pattern(const ArrivalPattern& pattern, const AlgoConfig& cfg) {
  if (pattern.M != cfg.M) {
    throw std::invalid_argument("arrival pattern built for M = " +
                                std::to_string(pattern.M) + ", config has M = " +
                                std::to_string(cfg.M));
  }
  if (static_cast<long>(pattern.schedule.size()) != cfg.T) {
    throw std::invalid_argument("arrival pattern length " +
                                std::to_string(pattern.schedule.size()) +
                                " does not cover T = " + std::to_string(cfg.T));
  }
}

void check_env(const LinearEnv& env, const AlgoConfig& cfg) {
  if (env.dim() != cfg.d) {
    throw std::invalid_argument("environment dimension " +
                                std::to_string(env.dim()) +
                                " does not match config d = " +
                                std::to_string(cfg.d));
  }
  if (!env.has_theta() && !env.uses_realized()) {
    throw std::invalid_argument("environment has neither theta nor rewards");
  }
}

// Resolved-parameter echo stored in the run meta so a log names everything
// needed to reproduce it bit for bit.
std::map<std::string, std::string> echo_config(const AlgoConfig& cfg,
                                               const RunOptions& opts) {
  std::map<std::string, std::string> out;
  out["d"] = std::to_string(cfg.d);
  out["K"] = std::to_string(cfg.K);
  out["M"] = std::to_string(cfg.M);
  out["T"] = std::to_string(cfg.T);
  out["delta"] = format_double(cfg.delta);
  out["variant"] = to_string(cfg.variant);
  out["R"] = format_double(cfg.R);
  out["Cp"] = format_double(cfg.Cp);
  out["ridge_lambda"] = format_double(cfg.ridge_lambda);
  out["seed"] = std::to_string(opts.seed);
  out["stream_client_base"] = std::to_string(opts.stream_client_base);
  return out;
}

// Shared bookkeeping: regret, coverage of the confidence widths on layers
// >= 1, and the per-layer elliptical potential on the global statistics.
class Accounting {
 public:
  Accounting(const AlgoConfig& cfg, int num_layers, const LinearEnv& env)
      : env_(env), per_client_(cfg.M, 0.0), lhs_(num_layers, 0.0) {
    mirror_.reserve(num_layers);
    for (int s = 0; s < num_layers; ++s) {
      mirror_.emplace_back(cfg.d, cfg.ridge_lambda);
    }
  }

  double observe(const std::vector<Vector>& contexts,
                 const SelectionResult& sel, const RewardSample& sample,
                 int client, double weight, int best, double best_mean) {
    double inst = 0.0;
    if (env_.has_theta()) {
      inst = best_mean - env_.theta().dot(contexts[sel.action]);
      regret_ += inst;
      per_client_[static_cast<std::size_t>(client)] += inst;
      for (const auto& trace : sel.candidate_trace) {
        if (trace.layer < 1) continue;
        ++coverage_pairs_;
        bool violated = false;
        for (std::size_t k = 0; k < trace.arms.size(); ++k) {
          const double truth = env_.theta().dot(contexts[trace.arms[k]]);
          if (std::abs(trace.rhat[k] - truth) > trace.width[k]) {
            violated = true;
            break;
          }
        }
        if (violated) ++coverage_violations_;
      }
    } else {
      realized_sum_ += sample.observed;
      // Uniform-arm expectation over the same round, the "random strategy"
      // yardstick for dataset runs.
      const auto& rc = env_.stream()->at(stream_round_);
      double mean = 0.0;
      for (double v : rc.realized) mean += v;
      random_baseline_ += mean / static_cast<double>(rc.realized.size());
    }

    RidgeStats& m = mirror_[static_cast<std::size_t>(sel.layer)];
    const double n = m.weighted_norm(contexts[sel.action]);
    lhs_[static_cast<std::size_t>(sel.layer)] +=
        std::min(1.0, weight * n * n);
    m.update(contexts[sel.action], sample.observed, weight);
    return inst;
  }

  void set_stream_round(long t) { stream_round_ = t; }

  void finalize(RunMeta& meta) const {
    meta.final_regret = regret_;
    meta.regret_valid = env_.has_theta();
    meta.per_client_regret = per_client_;
    meta.coverage_pairs = coverage_pairs_;
    meta.coverage_violations = coverage_violations_;
    meta.potential.clear();
    for (std::size_t s = 0; s < mirror_.size(); ++s) {
      const double d = static_cast<double>(mirror_[s].dim());
      const double rhs =
          2.0 * (mirror_[s].log_det() - d * std::log(mirror_[s].lambda()));
      meta.potential.push_back({lhs_[s], rhs});
    }
    meta.realized_reward_sum = realized_sum_;
    meta.random_baseline_sum = random_baseline_;
  }

 private:
  const LinearEnv& env_;
  double regret_ = 0.0;
  std::vector<double> per_client_;
  long coverage_pairs_ = 0;
  long coverage_violations_ = 0;
  std::vector<RidgeStats> mirror_;
  std::vector<double> lhs_;
  double realized_sum_ = 0.0;
  double random_baseline_ = 0.0;
  long stream_round_ = 1;
};

// Reward sample and arm-of-record for one pull.
struct PullOutcome {
  RewardSample sample;
  int best = -1;
  double best_mean = std::numeric_limits<double>::quiet_NaN();
};

PullOutcome take_reward(const LinearEnv& env, const std::vector<Vector>& contexts,
                        const SelectionResult& sel, long pull, RngStream& noise,
                        CorruptionAdversary* adversary) {
  PullOutcome out;
  if (env.has_theta()) {
    const auto best = env.best_arm(contexts);
    out.best = best.first;
    out.best_mean = best.second;
  }
  if (env.uses_realized()) {
    out.sample = env.realized_reward(pull, sel.action, adversary);
  } else {
    out.sample = env.reward(contexts[sel.action], pull, noise, adversary,
                            sel.action == out.best);
  }
  return out;
}

enum class Weighting { unit, variance, distrust };

// Asynchronous family: one client per pull, lazy or fresh pricing, optional
// determinant trigger. Covers run_async, both reweighted variants and the
// baseline.
ExperimentLog run_pull_loop(const AlgoConfig& cfg, const LinearEnv& env,
                            const ArrivalPattern& pattern,
                            const RunOptions& opts, const char* algo,
                            UpdateMode mode, Weighting weighting,
                            bool enable_comm) {
  const auto start = Clock::now();
  check_pattern(pattern, cfg);
  check_env(env, cfg);
  if (weighting == Weighting::variance &&
      env.noise().kind != NoiseKind::bounded_hetero) {
    throw std::invalid_argument(
        "variance-adaptive runs need a bounded_hetero environment");
  }

  const LayerSchedule schedule = build_schedule(cfg);
  const double trigger_c =
      enable_comm ? resolve_async_threshold(cfg)
                  : std::numeric_limits<double>::infinity();
  const SigmaBarParams sparams = weighting == Weighting::variance
                                     ? sigma_bar_params(cfg)
                                     : SigmaBarParams{};
  const double gamma = weighting == Weighting::distrust
                           ? corruption_gamma(cfg)
                           : std::numeric_limits<double>::infinity();

  ServerState server(cfg.d, schedule.num_layers(), cfg.ridge_lambda);
  std::vector<ClientState> clients;
  clients.reserve(cfg.M);
  std::vector<RngStream> ctx_rng;
  std::vector<RngStream> noise_rng;
  for (int i = 0; i < cfg.M; ++i) {
    clients.emplace_back(i, cfg.d, schedule.num_layers(), cfg.ridge_lambda);
    const int tag = opts.stream_client_base + i;
    ctx_rng.push_back(derive_stream(opts.seed, "contexts", tag));
    noise_rng.push_back(derive_stream(opts.seed, "noise", tag));
  }
  std::optional<CorruptionAdversary> adversary = env.adversary_template();

  ExperimentLog log;
  log.meta.algo = algo;
  log.meta.seed = opts.seed;
  log.meta.config = echo_config(cfg, opts);
  log.meta.config["pattern"] = to_string(pattern.kind);
  log.meta.config["C"] = format_double(trigger_c);
  log.records.reserve(cfg.T);
  Accounting account(cfg, schedule.num_layers(), env);

  for (long t = 1; t <= cfg.T; ++t) {
    const int i = pattern.schedule[static_cast<std::size_t>(t - 1)];
    const auto contexts = env.gen_contexts(t, cfg.K, ctx_rng[i]);
    const SelectionResult sel =
        slucb_select(clients[i], schedule, contexts, mode);
    account.set_stream_round(t);
    const PullOutcome outcome =
        take_reward(env, contexts, sel, t, noise_rng[i],
                    adversary ? &*adversary : nullptr);

    double weight = 1.0;
    switch (weighting) {
      case Weighting::unit:
        slucb_update(clients[i], sel.layer, contexts[sel.action],
                     outcome.sample.observed);
        break;
      case Weighting::variance: {
        const double sb =
            sigma_bar(outcome.sample.sigma_t, sparams, sel.norm_at_selection);
        weight = 1.0 / (sb * sb);
        vslucb_update(clients[i], sel.layer, contexts[sel.action],
                      outcome.sample.observed, sb);
        break;
      }
      case Weighting::distrust: {
        weight = corruption_weight(gamma, sel.norm_at_selection);
        cslucb_update(clients[i], sel.layer, contexts[sel.action],
                      outcome.sample.observed, weight);
        break;
      }
    }

    bool fired = false;
    if (enable_comm &&
        async_trigger(clients[i].synced[sel.layer], clients[i].pending[sel.layer],
                      trigger_c)) {
      fired = true;
      std::vector<ClientState*> just_me{&clients[i]};
      for (int s = 0; s < schedule.num_layers(); ++s) {
        sync_layer(server, just_me, s, t, log.comm, opts.messages);
      }
    }

    const double inst =
        account.observe(contexts, sel, outcome.sample, i, weight, outcome.best,
                        outcome.best_mean);

    RoundRecord rec;
    rec.t = t;
    rec.client = i;
    rec.layer = sel.layer;
    rec.inst_regret = inst;
    rec.comm_event = fired;
    rec.comm_participants = fired ? 1 : 0;
    rec.corruption = outcome.sample.corruption;
    rec.sigma_t = outcome.sample.sigma_t;
    rec.has_sigma = outcome.sample.has_sigma;
    log.records.push_back(rec);

    if (opts.observer) {
      opts.observer(RoundObservation{t, t, i, contexts, sel, outcome.sample,
                                     weight, outcome.best, outcome.best_mean,
                                     fired});
    }
  }

  account.finalize(log.meta);
  log.meta.comm_batches = log.comm.batch_count();
  log.meta.comm_exchanges = log.comm.exchange_count();
  log.meta.comm_bytes = log.comm.total_bytes();
  log.meta.wall_ms = elapsed_ms(start);
  return log;
}

}  // namespace

std::string to_string(ArrivalKind k) {
  switch (k) {
    case ArrivalKind::random: return "random";
    case ArrivalKind::round_robin: return "round_robin";
    case ArrivalKind::click_leave: return "click_leave";
    case ArrivalKind::custom: return "custom";
  }
  return "unknown";
}

ArrivalPattern make_arrivals(ArrivalKind kind, int M, long T, RngStream& rng) {
  if (M < 1) throw std::invalid_argument("arrivals need M >= 1");
  if (T < 1) throw std::invalid_argument("arrivals need T >= 1");
  if (kind == ArrivalKind::custom) {
    throw std::invalid_argument("custom arrivals take an explicit schedule");
  }
  ArrivalPattern pattern;
  pattern.kind = kind;
  pattern.M = M;
  pattern.schedule.reserve(T);

  if (kind == ArrivalKind::round_robin) {
    for (long t = 0; t < T; ++t) {
      pattern.schedule.push_back(static_cast<int>(t % M));
    }
    return pattern;
  }

  // Balanced slot counts, extras to the earlier-indexed clients.
  for (int i = 0; i < M; ++i) {
    const long slots = T / M + (i < static_cast<int>(T % M) ? 1 : 0);
    pattern.schedule.insert(pattern.schedule.end(),
                            static_cast<std::size_t>(slots), i);
  }
  if (kind == ArrivalKind::random) {
    rng.shuffle(pattern.schedule);
  }
  return pattern;
}

ArrivalPattern custom_arrivals(std::vector<int> schedule, int M) {
  if (M < 1) throw std::invalid_argument("arrivals need M >= 1");
  if (schedule.empty()) throw std::invalid_argument("empty custom schedule");
  for (int c : schedule) {
    if (c < 0 || c >= M) {
      throw std::invalid_argument("custom schedule references client " +
                                  std::to_string(c) + " outside [0, " +
                                  std::to_string(M) + ")");
    }
  }
  ArrivalPattern pattern;
  pattern.kind = ArrivalKind::custom;
  pattern.M = M;
  pattern.schedule = std::move(schedule);
  return pattern;
}

ExperimentLog run_async(const AlgoConfig& cfg, const LinearEnv& env,
                        const ArrivalPattern& pattern, const RunOptions& opts) {
  if (cfg.variant != Variant::standard) {
    throw std::invalid_argument("run_async expects the standard variant");
  }
  return run_pull_loop(cfg, env, pattern, opts, "async", UpdateMode::lazy,
                       Weighting::unit, true);
}

ExperimentLog run_variance_adaptive(const AlgoConfig& cfg, const LinearEnv& env,
                                    const ArrivalPattern& pattern,
                                    const RunOptions& opts) {
  if (cfg.variant != Variant::variance_adaptive) {
    throw std::invalid_argument(
        "run_variance_adaptive expects the variance_adaptive variant");
  }
  return run_pull_loop(cfg, env, pattern, opts, "variance", UpdateMode::lazy,
                       Weighting::variance, true);
}

ExperimentLog run_corruption_robust(const AlgoConfig& cfg, const LinearEnv& env,
                                    const ArrivalPattern& pattern,
                                    const RunOptions& opts) {
  if (cfg.variant != Variant::corruption_robust) {
    throw std::invalid_argument(
        "run_corruption_robust expects the corruption_robust variant");
  }
  return run_pull_loop(cfg, env, pattern, opts, "corruption", UpdateMode::lazy,
                       Weighting::distrust, true);
}

ExperimentLog run_baseline_suplinucb(const AlgoConfig& cfg, const LinearEnv& env,
                                     const RunOptions& opts) {
  if (cfg.variant != Variant::standard) {
    throw std::invalid_argument("the baseline runs the standard variant");
  }
  if (cfg.M != 1) {
    throw std::invalid_argument("the baseline is single-player (M = 1)");
  }
  ArrivalPattern solo;
  solo.kind = ArrivalKind::round_robin;
  solo.M = 1;
  solo.schedule.assign(static_cast<std::size_t>(cfg.T), 0);
  return run_pull_loop(cfg, env, solo, opts, "baseline", UpdateMode::fresh,
                       Weighting::unit, false);
}

ExperimentLog run_sync(const AlgoConfig& cfg, const LinearEnv& env,
                       const RunOptions& opts) {
  const auto start = Clock::now();
  if (cfg.variant != Variant::standard) {
    throw std::invalid_argument("run_sync expects the standard variant");
  }
  check_env(env, cfg);
  if (cfg.T % cfg.M != 0) {
    throw std::invalid_argument(
        "sync runs need M to divide T (T counts total pulls); got T = " +
        std::to_string(cfg.T) + ", M = " + std::to_string(cfg.M));
  }
  const long rounds = cfg.T / cfg.M;
  const double threshold = resolve_sync_threshold(cfg, rounds);
  const LayerSchedule schedule = build_schedule(cfg);

  ServerState server(cfg.d, schedule.num_layers(), cfg.ridge_lambda);
  std::vector<ClientState> clients;
  std::vector<ClientState*> everyone;
  std::vector<RngStream> ctx_rng;
  std::vector<RngStream> noise_rng;
  clients.reserve(cfg.M);
  for (int i = 0; i < cfg.M; ++i) {
    clients.emplace_back(i, cfg.d, schedule.num_layers(), cfg.ridge_lambda);
    const int tag = opts.stream_client_base + i;
    ctx_rng.push_back(derive_stream(opts.seed, "contexts", tag));
    noise_rng.push_back(derive_stream(opts.seed, "noise", tag));
  }
  for (auto& c : clients) everyone.push_back(&c);
  std::optional<CorruptionAdversary> adversary = env.adversary_template();

  ExperimentLog log;
  log.meta.algo = "sync";
  log.meta.seed = opts.seed;
  log.meta.config = echo_config(cfg, opts);
  log.meta.config["D"] = format_double(threshold);
  log.records.reserve(cfg.T);
  Accounting account(cfg, schedule.num_layers(), env);

  std::vector<long> t_last(schedule.num_layers(), 0);
  std::vector<bool> marked(schedule.num_layers(), false);

  for (long t = 1; t <= rounds; ++t) {
    std::fill(marked.begin(), marked.end(), false);
    bool any = false;
    for (int i = 0; i < cfg.M; ++i) {
      const long pull = (t - 1) * cfg.M + i + 1;
      const auto contexts = env.gen_contexts(pull, cfg.K, ctx_rng[i]);
      const SelectionResult sel =
          slucb_select(clients[i], schedule, contexts, UpdateMode::fresh);
      account.set_stream_round(pull);
      const PullOutcome outcome =
          take_reward(env, contexts, sel, pull, noise_rng[i],
                      adversary ? &*adversary : nullptr);
      slucb_update(clients[i], sel.layer, contexts[sel.action],
                   outcome.sample.observed);

      if (sync_trigger(clients[i].synced[sel.layer], clients[i].pending[sel.layer],
                       t, t_last[sel.layer], threshold)) {
        marked[static_cast<std::size_t>(sel.layer)] = true;
        any = true;
      }

      const double inst = account.observe(contexts, sel, outcome.sample, i, 1.0,
                                          outcome.best, outcome.best_mean);
      RoundRecord rec;
      rec.t = t;
      rec.client = i;
      rec.layer = sel.layer;
      rec.inst_regret = inst;
      rec.corruption = outcome.sample.corruption;
      rec.sigma_t = outcome.sample.sigma_t;
      rec.has_sigma = outcome.sample.has_sigma;
      log.records.push_back(rec);

      if (opts.observer) {
        opts.observer(RoundObservation{t, pull, i, contexts, sel, outcome.sample,
                                       1.0, outcome.best, outcome.best_mean,
                                       false});
      }
    }

    if (any) {
      for (int s = 0; s < schedule.num_layers(); ++s) {
        if (!marked[static_cast<std::size_t>(s)]) continue;
        sync_layer(server, everyone, s, t, log.comm, opts.messages);
        t_last[static_cast<std::size_t>(s)] = t;
      }
      log.records.back().comm_event = true;
      log.records.back().comm_participants = cfg.M;
    }
  }

  account.finalize(log.meta);
  log.meta.comm_batches = log.comm.batch_count();
  log.meta.comm_exchanges = log.comm.exchange_count();
  log.meta.comm_bytes = log.comm.total_bytes();
  log.meta.wall_ms = elapsed_ms(start);
  return log;
}

}  // namespace fedsup
