#include "fedsuplinucb/environment.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

using namespace fedsup;
namespace fs = std::filesystem;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

fs::path write_csv(const std::string& name, const std::string& body) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << body;
  return p;
}

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name, const std::string& body)
      : path(write_csv(name, body)) {}
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

}  // namespace

TEST_CASE("sphere samples live on the sphere") {
  RngStream rng(99);
  for (int d : {1, 2, 3, 25}) {
    for (int i = 0; i < 50; ++i) {
      const Vector x = sample_sphere(d, rng);
      CHECK(std::abs(x.norm() - 1.0) < 1e-12);
    }
  }

  SUBCASE("d = 1 gives exactly +-1") {
    for (int i = 0; i < 100; ++i) {
      const Vector x = sample_sphere(1, rng);
      CHECK(std::abs(x(0)) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("scale is applied to the radius") {
    const Vector x = sample_sphere(4, rng, 0.25);
    CHECK(x.norm() == doctest::Approx(0.25).epsilon(1e-12));
  }

  SUBCASE("coordinates have mean zero") {
    // Each coordinate of a uniform sphere point has mean 0 and variance 1/d.
    const int d = 3;
    const int n = 20000;
    Vector sum = Vector::Zero(d);
    for (int i = 0; i < n; ++i) sum += sample_sphere(d, rng);
    const double se = 1.0 / std::sqrt(static_cast<double>(d) * n);
    for (int j = 0; j < d; ++j) {
      CHECK(std::abs(sum(j) / n) < 4.0 * se);
    }
  }

  CHECK_THROWS_AS(sample_sphere(0, rng), std::invalid_argument);
}

TEST_CASE("noise model constructors validate their inputs") {
  CHECK(NoiseModel::none().kind == NoiseKind::none);
  CHECK(NoiseModel::gaussian(0.01).sigma == 0.01);
  CHECK_THROWS_AS(NoiseModel::gaussian(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(
      NoiseModel::gaussian(std::numeric_limits<double>::quiet_NaN()),
      std::invalid_argument);

  CHECK_THROWS_AS(NoiseModel::bounded_hetero(0.0, SigmaSchedule::constant(0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::bounded_hetero(1.0, SigmaSchedule{{}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::bounded_hetero(1.0, SigmaSchedule{{0.5, -0.1}}),
                  std::invalid_argument);
  // A schedule value above the bound R is rejected up front.
  CHECK_THROWS_AS(NoiseModel::bounded_hetero(0.5, SigmaSchedule{{0.2, 0.7}}),
                  std::invalid_argument);
}

TEST_CASE("sigma schedules cycle by round") {
  const SigmaSchedule sched{{0.1, 0.2, 0.3}};
  CHECK(sched.at(1) == 0.1);
  CHECK(sched.at(2) == 0.2);
  CHECK(sched.at(3) == 0.3);
  CHECK(sched.at(4) == 0.1);
  CHECK(sched.at(7) == 0.1);
  CHECK(SigmaSchedule::constant(0.05).at(123) == 0.05);
}

TEST_CASE("noiseless rewards are exactly theta dot x") {
  const auto env = LinearEnv::synthetic(vec2(0.6, 0.8), NoiseModel::none());
  RngStream rng(1);
  const RewardSample s = env.reward(vec2(1.0, 0.0), 1, rng, nullptr, false);
  CHECK(s.observed == 0.6);
  CHECK(s.true_mean == 0.6);
  CHECK(s.noise == 0.0);
  CHECK(s.corruption == 0.0);
  CHECK_FALSE(s.has_sigma);
}

TEST_CASE("gaussian noise has the configured variance") {
  const double sigma = 0.01;
  const auto env =
      LinearEnv::synthetic(vec2(0.5, 0.0), NoiseModel::gaussian(sigma));
  RngStream rng(2024);
  const Vector x = vec2(1.0, 0.0);

  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const RewardSample s = env.reward(x, i + 1, rng, nullptr, false);
    CHECK(s.true_mean == 0.5);
    sum += s.noise;
    sum2 += s.noise * s.noise;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 * sigma / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.05));
}

TEST_CASE("bounded heteroscedastic noise is exactly +-sigma_t") {
  const auto env = LinearEnv::synthetic(
      vec2(0.5, 0.0),
      NoiseModel::bounded_hetero(1.0, SigmaSchedule{{0.1, 0.4}}));
  RngStream rng(7);
  const Vector x = vec2(0.0, 1.0);  // true mean 0 isolates the noise

  int plus = 0, minus = 0;
  for (long t = 1; t <= 2000; ++t) {
    const RewardSample s = env.reward(x, t, rng, nullptr, false);
    const double expect_sigma = (t % 2 == 1) ? 0.1 : 0.4;
    CHECK(s.has_sigma);
    CHECK(s.sigma_t == expect_sigma);
    CHECK(std::abs(s.noise) == expect_sigma);
    CHECK(std::abs(s.noise) <= env.noise().R);
    (s.noise > 0.0 ? plus : minus) += 1;
  }
  // Signs are a fair coin; 2000 flips stay within 4 standard errors.
  CHECK(std::abs(plus - minus) < 4.0 * std::sqrt(2000.0));
}

TEST_CASE("corruption adversary respects its budget") {
  SUBCASE("sign flip prefix drains the budget then stops") {
    CorruptionAdversary adv(CorruptionStrategy::sign_flip_prefix, 3.0);
    // Round 1: wants -2, remaining 3 -> applies -2.
    CHECK(adv.corrupt(1, 1.0, false) == -2.0);
    CHECK(adv.spent() == 2.0);
    // Round 2: wants -2 but only 1 left -> clipped to -1.
    CHECK(adv.corrupt(2, 1.0, false) == -1.0);
    CHECK(adv.spent() == 3.0);
    // Round 3: budget exhausted.
    CHECK(adv.corrupt(3, 1.0, false) == 0.0);
    CHECK(adv.spent() == 3.0);
    // Round 4 is past the prefix anyway.
    CHECK(adv.corrupt(4, 1.0, false) == 0.0);
  }

  SUBCASE("targeted strategy only touches best-arm pulls") {
    CorruptionAdversary adv(CorruptionStrategy::targeted_best_arm, 10.0);
    CHECK(adv.corrupt(1, 0.7, false) == 0.0);
    CHECK(adv.corrupt(2, 0.7, true) == doctest::Approx(-1.4));
    CHECK(adv.spent() == doctest::Approx(1.4));
  }

  SUBCASE("custom strategy is clipped, sign preserved") {
    CorruptionAdversary adv(
        CorruptionStrategy::custom, 1.0,
        [](long, double, bool) { return -5.0; });
    CHECK(adv.corrupt(1, 0.0, false) == -1.0);
    CHECK(adv.corrupt(2, 0.0, false) == 0.0);
    CHECK(adv.spent() == 1.0);
  }

  SUBCASE("total |corruption| never exceeds the budget") {
    CorruptionAdversary adv(
        CorruptionStrategy::custom, 2.5,
        [](long t, double, bool) { return (t % 2 == 0) ? 0.9 : -0.7; });
    double total = 0.0;
    for (long t = 1; t <= 50; ++t) total += std::abs(adv.corrupt(t, 0.0, false));
    CHECK(total == doctest::Approx(adv.spent()).epsilon(1e-12));
    CHECK(adv.spent() <= 2.5 + 1e-12);
  }

  SUBCASE("zero budget is a no-op adversary") {
    CorruptionAdversary adv(CorruptionStrategy::targeted_best_arm, 0.0);
    CHECK(adv.corrupt(1, 1.0, true) == 0.0);
    CHECK(adv.spent() == 0.0);
  }

  CHECK_THROWS_AS(CorruptionAdversary(CorruptionStrategy::sign_flip_prefix, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      CorruptionAdversary(CorruptionStrategy::sign_flip_prefix,
                          std::numeric_limits<double>::infinity()),
      std::invalid_argument);
  CHECK_THROWS_AS(CorruptionAdversary(CorruptionStrategy::custom, 1.0),
                  std::invalid_argument);
  CorruptionAdversary bad(CorruptionStrategy::custom, 1.0,
                          [](long, double, bool) {
                            return std::numeric_limits<double>::quiet_NaN();
                          });
  CHECK_THROWS_AS(bad.corrupt(1, 0.0, false), std::runtime_error);
}

TEST_CASE("adversary attached to the environment edits observed rewards") {
  auto env = LinearEnv::synthetic(vec2(1.0, 0.0), NoiseModel::none());
  env.attach_adversary(
      CorruptionAdversary(CorruptionStrategy::sign_flip_prefix, 100.0));
  REQUIRE(env.adversary_template().has_value());

  // The run owns a mutable copy; the template itself never accrues spend.
  CorruptionAdversary local = *env.adversary_template();
  RngStream rng(1);
  const RewardSample s = env.reward(vec2(1.0, 0.0), 1, rng, &local, false);
  CHECK(s.true_mean == 1.0);
  CHECK(s.corruption == -2.0);
  CHECK(s.observed == -1.0);
  CHECK(local.spent() == 2.0);
  CHECK(env.adversary_template()->spent() == 0.0);
}

TEST_CASE("best arm is the exact argmax with ties to the lowest index") {
  const auto env = LinearEnv::synthetic(vec2(1.0, 0.0), NoiseModel::none());

  const std::vector<Vector> contexts{vec2(0.3, 0.9), vec2(0.8, 0.1),
                                     vec2(-0.5, 0.0)};
  const auto [arm, value] = env.best_arm(contexts);
  CHECK(arm == 1);
  CHECK(value == 0.8);

  SUBCASE("exact tie keeps the earlier arm") {
    const std::vector<Vector> tied{vec2(0.0, 1.0), vec2(0.5, 0.0),
                                   vec2(0.5, -0.2)};
    CHECK(env.best_arm(tied).first == 1);
  }

  CHECK_THROWS_AS(env.best_arm({}), std::invalid_argument);
}

TEST_CASE("synthetic environment constructor guards") {
  CHECK_THROWS_AS(LinearEnv::synthetic(Vector(), NoiseModel::none()),
                  std::invalid_argument);
  CHECK_THROWS_AS(LinearEnv::synthetic(vec2(0.9, 0.9), NoiseModel::none()),
                  std::invalid_argument);  // norm ~1.27 > 1
  Vector nan_theta = vec2(0.1, std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(LinearEnv::synthetic(nan_theta, NoiseModel::none()),
                  std::invalid_argument);
  // Exactly unit norm is allowed.
  CHECK_NOTHROW(LinearEnv::synthetic(vec2(0.6, 0.8), NoiseModel::none()));

  const auto env = LinearEnv::synthetic(vec2(0.6, 0.8), NoiseModel::none());
  CHECK(env.has_theta());
  CHECK(env.dim() == 2);
  CHECK(env.stream() == nullptr);
  CHECK_FALSE(env.uses_realized());
  RngStream rng(3);
  CHECK_THROWS_AS(env.gen_contexts(1, 0, rng), std::invalid_argument);
  const auto contexts = env.gen_contexts(1, 5, rng);
  CHECK(contexts.size() == 5);
  for (const auto& x : contexts) CHECK(std::abs(x.norm() - 1.0) < 1e-12);
}

TEST_CASE("context streams parse, validate, and replay") {
  const std::string good =
      "round,arm,x_1,x_2\n"
      "1,0,1.0,0.0\n"
      "1,1,0.0,0.5\n"
      "2,0,0.25,0.25\n"
      "2,1,3.0,4.0\n"   // norm 5: gets pulled back to the sphere
      "3,0,-1.0,0.0\n"
      "3,1,0.0,0.0\n";

  SUBCASE("well-formed file round-trips values") {
    TempFile f("fedsup_stream_good.csv", good);
    const ContextStream stream = load_context_stream(f.path);
    CHECK(stream.d == 2);
    CHECK(stream.K == 2);
    CHECK(stream.num_rounds() == 3);
    CHECK_FALSE(stream.has_rewards);
    CHECK(stream.renormalized_rows == 1);

    CHECK(stream.at(1).arms[0](0) == 1.0);
    CHECK(stream.at(1).arms[1](1) == 0.5);
    CHECK(stream.at(2).arms[1](0) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(stream.at(2).arms[1](1) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(stream.at(3).arms[0](0) == -1.0);

    CHECK_THROWS_AS(stream.at(0), std::out_of_range);
    CHECK_THROWS_AS(stream.at(4), std::out_of_range);
  }

  SUBCASE("stream-backed environment replays contexts verbatim") {
    TempFile f("fedsup_stream_env.csv", good);
    const auto env = LinearEnv::with_stream(vec2(1.0, 0.0), NoiseModel::none(),
                                            load_context_stream(f.path));
    RngStream rng(4);
    const auto round1 = env.gen_contexts(1, 2, rng);
    CHECK(round1[0](0) == 1.0);
    CHECK(round1[1](1) == 0.5);
    // Same call again: replay is stateless in t.
    const auto again = env.gen_contexts(1, 2, rng);
    CHECK(again[0] == round1[0]);
    CHECK_THROWS_AS(env.gen_contexts(1, 3, rng), std::invalid_argument);
    CHECK_THROWS_AS(env.gen_contexts(4, 2, rng), std::out_of_range);

    // Rewards still come from theta.
    const RewardSample s = env.reward(round1[0], 1, rng, nullptr, false);
    CHECK(s.observed == 1.0);
  }

  SUBCASE("dimension mismatch with theta is rejected") {
    TempFile f("fedsup_stream_dim.csv", good);
    Vector theta3(3);
    theta3 << 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(LinearEnv::with_stream(theta3, NoiseModel::none(),
                                           load_context_stream(f.path)),
                    std::invalid_argument);
  }
}

TEST_CASE("context streams with a reward column drive realized replay") {
  const std::string body =
      "round,arm,x_1,x_2,reward\n"
      "1,0,1.0,0.0,0.9\n"
      "1,1,0.0,1.0,-0.2\n"
      "2,0,0.5,0.0,0.1\n"
      "2,1,0.0,0.5,0.8\n";
  TempFile f("fedsup_stream_rewards.csv", body);
  const ContextStream stream = load_context_stream(f.path);
  CHECK(stream.has_rewards);
  CHECK(stream.at(1).realized[0] == 0.9);
  CHECK(stream.at(2).realized[1] == 0.8);

  const auto env = LinearEnv::from_realized(stream);
  CHECK_FALSE(env.has_theta());
  CHECK(env.uses_realized());
  CHECK_THROWS_AS(env.theta(), std::logic_error);

  const RewardSample s = env.realized_reward(1, 1, nullptr);
  CHECK(s.observed == -0.2);
  CHECK(std::isnan(s.true_mean));
  CHECK_THROWS_AS(env.realized_reward(1, 2, nullptr), std::out_of_range);
  CHECK_THROWS_AS(env.realized_reward(5, 0, nullptr), std::out_of_range);

  SUBCASE("adversary applies to realized rewards too") {
    CorruptionAdversary adv(CorruptionStrategy::custom, 0.3,
                            [](long, double, bool) { return 0.5; });
    const RewardSample c = env.realized_reward(1, 0, &adv);
    CHECK(c.corruption == doctest::Approx(0.3));
    CHECK(c.observed == doctest::Approx(1.2));
  }

  SUBCASE("realized replay needs a reward column") {
    const std::string no_rewards =
        "round,arm,x_1,x_2\n"
        "1,0,1.0,0.0\n"
        "1,1,0.0,1.0\n";
    TempFile g("fedsup_stream_norew.csv", no_rewards);
    CHECK_THROWS_AS(LinearEnv::from_realized(load_context_stream(g.path)),
                    std::invalid_argument);
  }
}

TEST_CASE("malformed context streams fail loudly and name the row") {
  auto load_body = [](const std::string& name, const std::string& body) {
    TempFile f(name, body);
    return load_context_stream(f.path);
  };

  CHECK_THROWS_AS(load_context_stream("/nonexistent/stream.csv"),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_body("fedsup_bad_empty.csv", ""), std::invalid_argument);
  CHECK_THROWS_AS(load_body("fedsup_bad_headonly.csv", "round,arm,x_1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_body("fedsup_bad_header.csv", "t,arm,x_1\n1,0,0.5\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      load_body("fedsup_bad_xcols.csv", "round,arm,y_1\n1,0,0.5\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(load_body("fedsup_bad_nox.csv", "round,arm\n1,0\n"),
                  std::invalid_argument);

  SUBCASE("field-count and parse errors carry the row number") {
    CHECK_THROWS_WITH_AS(
        load_body("fedsup_bad_fields.csv",
                  "round,arm,x_1,x_2\n1,0,1.0,0.0\n1,1,0.5\n"),
        doctest::Contains("row 3"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        load_body("fedsup_bad_double.csv",
                  "round,arm,x_1\n1,0,1.0\n2,0,abc\n"),
        doctest::Contains("row 3"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        load_body("fedsup_bad_round.csv",
                  "round,arm,x_1\n1,0,1.0\n3,0,0.5\n"),
        doctest::Contains("rounds must advance"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        load_body("fedsup_bad_armorder.csv",
                  "round,arm,x_1\n1,1,1.0\n"),
        doctest::Contains("rounds must advance"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        load_body("fedsup_bad_armcount.csv",
                  "round,arm,x_1\n1,0,1.0\n1,1,0.5\n2,0,0.5\n3,0,0.5\n"),
        doctest::Contains("expected 2"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        load_body("fedsup_bad_inf.csv", "round,arm,x_1\n1,0,inf\n"),
        doctest::Contains("row 2"), std::invalid_argument);
  }
}
