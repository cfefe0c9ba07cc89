#include "fedsuplinucb/environment.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fedsup {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void row_error(long row, const std::string& what) {
  throw std::invalid_argument("context stream row " + std::to_string(row) +
                              ": " + what);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, long row, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    row_error(row, std::string("bad ") + what + " value '" + s + "'");
  }
}

long parse_long(const std::string& s, long row, const char* what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    row_error(row, std::string("bad ") + what + " value '" + s + "'");
  }
}

}  // namespace

NoiseModel NoiseModel::none() { return {}; }

NoiseModel NoiseModel::gaussian(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("gaussian noise needs sigma >= 0");
  }
  NoiseModel m;
  m.kind = NoiseKind::gaussian;
  m.sigma = sigma;
  return m;
}

NoiseModel NoiseModel::bounded_hetero(double R, SigmaSchedule schedule) {
  if (!(R > 0.0) || !std::isfinite(R)) {
    throw std::invalid_argument("bounded_hetero needs R > 0");
  }
  if (schedule.values.empty()) {
    throw std::invalid_argument("sigma schedule is empty");
  }
  for (double s : schedule.values) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("sigma schedule values must be >= 0");
    }
    if (s > R) {
      throw std::invalid_argument("sigma schedule value " + std::to_string(s) +
                                  " exceeds the bound R = " + std::to_string(R));
    }
  }
  NoiseModel m;
  m.kind = NoiseKind::bounded_hetero;
  m.R = R;
  m.schedule = std::move(schedule);
  return m;
}

CorruptionAdversary::CorruptionAdversary(CorruptionStrategy strategy,
                                         double budget, CorruptionFn custom)
    : strategy_(strategy), budget_(budget), custom_(std::move(custom)) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw std::invalid_argument("corruption budget must be finite and >= 0");
  }
  if (strategy == CorruptionStrategy::custom && !custom_) {
    throw std::invalid_argument("custom corruption strategy needs a function");
  }
}

double CorruptionAdversary::corrupt(long t, double clean_reward,
                                    bool chose_best) {
  double want = 0.0;
  switch (strategy_) {
    case CorruptionStrategy::sign_flip_prefix:
      // Flip the sign of everything observed on the first floor(budget)
      // rounds; the budget cap below also ends the attack on its own.
      if (t <= static_cast<long>(budget_)) want = -2.0 * clean_reward;
      break;
    case CorruptionStrategy::targeted_best_arm:
      if (chose_best) want = -2.0 * clean_reward;
      break;
    case CorruptionStrategy::custom:
      want = custom_(t, clean_reward, chose_best);
      break;
  }
  if (!std::isfinite(want)) {
    throw std::runtime_error("corruption strategy produced a non-finite value");
  }
  const double remaining = budget_ - spent_;
  double applied = want;
  if (std::abs(applied) > remaining) {
    applied = (applied < 0.0 ? -1.0 : 1.0) * remaining;
  }
  spent_ += std::abs(applied);
  return applied;
}

const RoundContexts& ContextStream::at(long t) const {
  if (t < 1 || t > num_rounds()) {
    throw std::out_of_range("context stream exhausted at round " +
                            std::to_string(t) + " of " +
                            std::to_string(num_rounds()));
  }
  return rounds[static_cast<std::size_t>(t - 1)];
}

ContextStream load_context_stream(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open context stream: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("context stream is empty: " + path.string());
  }

  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "round" || header[1] != "arm") {
    throw std::invalid_argument(
        "context stream header must start with 'round,arm,x_1,...'");
  }
  ContextStream stream;
  std::size_t cols = header.size();
  stream.has_rewards = header.back() == "reward";
  stream.d = static_cast<int>(cols - 2 - (stream.has_rewards ? 1 : 0));
  if (stream.d < 1) {
    throw std::invalid_argument("context stream has no x_* columns");
  }
  for (int j = 0; j < stream.d; ++j) {
    if (header[2 + j] != "x_" + std::to_string(j + 1)) {
      throw std::invalid_argument("context column " + std::to_string(2 + j) +
                                  " must be named x_" + std::to_string(j + 1));
    }
  }

  long row = 1;
  long expect_round = 1;
  int expect_arm = 0;
  RoundContexts current;
  auto flush_round = [&] {
    if (current.arms.empty()) return;
    if (stream.K == 0) {
      stream.K = static_cast<int>(current.arms.size());
    } else if (static_cast<int>(current.arms.size()) != stream.K) {
      row_error(row, "round " + std::to_string(expect_round) + " has " +
                         std::to_string(current.arms.size()) + " arms, expected " +
                         std::to_string(stream.K));
    }
    current.has_realized = stream.has_rewards;
    stream.rounds.push_back(std::move(current));
    current = RoundContexts{};
  };

  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != cols) {
      row_error(row, "expected " + std::to_string(cols) + " fields, got " +
                         std::to_string(fields.size()));
    }
    const long r = parse_long(fields[0], row, "round");
    const long a = parse_long(fields[1], row, "arm");
    if (r == expect_round + 1 && a == 0) {
      flush_round();
      ++expect_round;
      expect_arm = 0;
    }
    if (r != expect_round || a != expect_arm) {
      row_error(row, "rounds must advance 1,2,... with arms 0..K-1 in order");
    }
    Vector x(stream.d);
    for (int j = 0; j < stream.d; ++j) {
      x(j) = parse_double(fields[2 + j], row, "context");
    }
    const double norm = x.norm();
    if (norm > 1.0) {
      x /= norm;
      ++stream.renormalized_rows;
    }
    current.arms.push_back(std::move(x));
    if (stream.has_rewards) {
      current.realized.push_back(parse_double(fields[cols - 1], row, "reward"));
    }
    ++expect_arm;
  }
  flush_round();
  if (stream.rounds.empty()) {
    throw std::invalid_argument("context stream has no data rows: " +
                                path.string());
  }
  return stream;
}

Vector sample_sphere(int d, RngStream& rng, double scale) {
  if (d < 1) throw std::invalid_argument("sphere dimension must be >= 1");
  Vector x(d);
  double norm = 0.0;
  do {
    for (int j = 0; j < d; ++j) x(j) = rng.gaussian();
    norm = x.norm();
  } while (norm < 1e-12);
  return x * (scale / norm);
}

LinearEnv LinearEnv::synthetic(Vector theta, NoiseModel noise) {
  if (theta.size() < 1) throw std::invalid_argument("theta is empty");
  if (!theta.allFinite()) throw std::invalid_argument("theta has non-finite entries");
  if (theta.norm() > 1.0 + 1e-9) {
    throw std::invalid_argument("theta must lie in the unit ball");
  }
  LinearEnv env;
  env.dim_ = static_cast<int>(theta.size());
  env.theta_ = std::move(theta);
  env.noise_ = std::move(noise);
  return env;
}

LinearEnv LinearEnv::with_stream(Vector theta, NoiseModel noise,
                                 ContextStream stream) {
  LinearEnv env = synthetic(std::move(theta), std::move(noise));
  if (stream.d != env.dim_) {
    throw std::invalid_argument("stream dimension " + std::to_string(stream.d) +
                                " does not match theta dimension " +
                                std::to_string(env.dim_));
  }
  env.stream_ = std::move(stream);
  return env;
}

LinearEnv LinearEnv::from_realized(ContextStream stream) {
  if (!stream.has_rewards) {
    throw std::invalid_argument(
        "realized-reward environment needs a stream with a reward column");
  }
  LinearEnv env;
  env.dim_ = stream.d;
  env.stream_ = std::move(stream);
  env.use_realized_ = true;
  return env;
}

const Vector& LinearEnv::theta() const {
  if (!theta_) {
    throw std::logic_error("environment has no theta (realized-reward stream)");
  }
  return *theta_;
}

void LinearEnv::attach_adversary(CorruptionAdversary adversary) {
  adversary_ = std::move(adversary);
}

std::vector<Vector> LinearEnv::gen_contexts(long t, int K, RngStream& rng) const {
  if (K < 1) throw std::invalid_argument("need at least one arm");
  if (stream_) {
    const RoundContexts& rc = stream_->at(t);
    if (static_cast<int>(rc.arms.size()) != K) {
      throw std::invalid_argument("stream provides " +
                                  std::to_string(rc.arms.size()) +
                                  " arms, run wants " + std::to_string(K));
    }
    return rc.arms;
  }
  std::vector<Vector> contexts;
  contexts.reserve(K);
  for (int a = 0; a < K; ++a) contexts.push_back(sample_sphere(dim_, rng));
  return contexts;
}

RewardSample LinearEnv::reward(const Vector& x, long t, RngStream& rng,
                               CorruptionAdversary* adversary,
                               bool chose_best) const {
  RewardSample s;
  s.true_mean = theta().dot(x);
  switch (noise_.kind) {
    case NoiseKind::none:
      break;
    case NoiseKind::gaussian:
      s.noise = noise_.sigma * rng.gaussian();
      break;
    case NoiseKind::bounded_hetero: {
      s.sigma_t = noise_.schedule.at(t);
      s.has_sigma = true;
      // Symmetric two-point noise: mean zero, variance sigma_t^2, |.| <= R.
      s.noise = rng.uniform() < 0.5 ? s.sigma_t : -s.sigma_t;
      break;
    }
  }
  const double clean = s.true_mean + s.noise;
  if (adversary != nullptr) {
    s.corruption = adversary->corrupt(t, clean, chose_best);
  }
  s.observed = clean + s.corruption;
  return s;
}

RewardSample LinearEnv::realized_reward(long t, int arm,
                                        CorruptionAdversary* adversary) const {
  if (!stream_ || !stream_->has_rewards) {
    throw std::logic_error("environment has no realized rewards");
  }
  const RoundContexts& rc = stream_->at(t);
  if (arm < 0 || arm >= static_cast<int>(rc.realized.size())) {
    throw std::out_of_range("arm outside the stream's realized rewards");
  }
  RewardSample s;
  s.true_mean = kNaN;
  const double clean = rc.realized[static_cast<std::size_t>(arm)];
  if (adversary != nullptr) {
    s.corruption = adversary->corrupt(t, clean, false);
  }
  s.observed = clean + s.corruption;
  return s;
}

std::pair<int, double> LinearEnv::best_arm(
    const std::vector<Vector>& contexts) const {
  if (contexts.empty()) throw std::invalid_argument("no contexts");
  const Vector& th = theta();
  int best = 0;
  double best_val = th.dot(contexts[0]);
  for (int a = 1; a < static_cast<int>(contexts.size()); ++a) {
    const double v = th.dot(contexts[a]);
    if (v > best_val) {
      best = a;
      best_val = v;
    }
  }
  return {best, best_val};
}

}  // namespace fedsup
