#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fedsuplinucb/client.hpp"
#include "fedsuplinucb/rng.hpp"

using namespace fedsup;

namespace {

Vector e(int dim, int i) {
  Vector v = Vector::Zero(dim);
  v[i] = 1.0;
  return v;
}

AlgoConfig tiny_cfg() {
  AlgoConfig cfg;
  cfg.d = 2;
  cfg.K = 2;
  cfg.M = 2;
  cfg.T = 400;
  cfg.delta = 0.1;
  return cfg;
}

bool is_subset(const std::vector<int>& inner, const std::vector<int>& outer) {
  return std::all_of(inner.begin(), inner.end(), [&](int a) {
    return std::find(outer.begin(), outer.end(), a) != outer.end();
  });
}

}  // namespace

TEST_CASE("optimism screen keeps arms whose upper bound reaches the best lower bound") {
  SUBCASE("fresh-state symmetry keeps everything") {
    std::vector<ArmEstimate> est(4, {0.0, 0.3});
    CHECK(initial_screen(est) == std::vector<int>{0, 1, 2, 3});
  }
  SUBCASE("dominated arm is dropped") {
    std::vector<ArmEstimate> est{{1.0, 0.1}, {0.0, 0.1}};
    CHECK(initial_screen(est) == std::vector<int>{0});
  }
  SUBCASE("near-tie survives") {
    std::vector<ArmEstimate> est{{1.0, 0.1}, {0.9, 0.1}};
    CHECK(initial_screen(est) == std::vector<int>{0, 1});
  }
  SUBCASE("always contains the best-lower-bound arm") {
    RngStream rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<ArmEstimate> est(5);
      int best = 0;
      for (int a = 0; a < 5; ++a) {
        est[a] = {rng.gaussian(), rng.uniform()};
        if (est[a].rhat - est[a].width > est[best].rhat - est[best].width) {
          best = a;
        }
      }
      const auto kept = initial_screen(est);
      CHECK_FALSE(kept.empty());
      CHECK(std::find(kept.begin(), kept.end(), best) != kept.end());
    }
  }
  CHECK_THROWS_AS(initial_screen({}), std::invalid_argument);
}

TEST_CASE("layer filter keeps arms within twice the acceptance width") {
  const std::vector<int> both{0, 1};
  CHECK(layer_filter(both, {0.5, 0.5}, 0.1) == both);
  CHECK(layer_filter(both, {0.9, 0.5}, 0.1) == std::vector<int>{0});
  CHECK(layer_filter(both, {0.9, 0.75}, 0.1) == both);

  // candidates may be a sparse subset; rhat is indexed by arm id
  CHECK(layer_filter({1, 3}, {9.0, 0.6, 9.0, 0.5}, 0.02) ==
        std::vector<int>{1});

  SUBCASE("estimate argmax always survives") {
    RngStream rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> rhat(6);
      for (auto& v : rhat) v = rng.gaussian();
      const auto kept = layer_filter({0, 1, 2, 3, 4, 5}, rhat, rng.uniform());
      CHECK_FALSE(kept.empty());
      const int argmax = static_cast<int>(
          std::max_element(rhat.begin(), rhat.end()) - rhat.begin());
      CHECK(std::find(kept.begin(), kept.end(), argmax) != kept.end());
    }
  }
  CHECK_THROWS_AS(layer_filter({}, {0.1}, 0.1), std::invalid_argument);
}

TEST_CASE("selection on fresh statistics plays the widest arm at layer zero") {
  const AlgoConfig cfg = tiny_cfg();
  const LayerSchedule sched = build_schedule(cfg);
  ClientState state(0, cfg.d, sched.num_layers());

  const std::vector<Vector> contexts{e(2, 0), 0.5 * e(2, 1)};
  for (auto mode : {UpdateMode::lazy, UpdateMode::fresh}) {
    const SelectionResult sel = slucb_select(state, sched, contexts, mode);
    CHECK(sel.action == 0);
    CHECK(sel.layer == 0);
    CHECK(sel.width_at_selection ==
          doctest::Approx(sched.alpha[0]).epsilon(1e-12));
    CHECK(sel.norm_at_selection == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("single arm is always chosen") {
  const AlgoConfig cfg = tiny_cfg();
  const LayerSchedule sched = build_schedule(cfg);
  ClientState state(0, cfg.d, sched.num_layers());
  const SelectionResult sel =
      slucb_select(state, sched, {e(2, 0)}, UpdateMode::lazy);
  CHECK(sel.action == 0);
  CHECK(sel.layer == 0);  // fresh stats: width alpha_0 exceeds w_bar_0
}

TEST_CASE("zero contexts force a full descent to the terminal layer") {
  const AlgoConfig cfg = tiny_cfg();
  const LayerSchedule sched = build_schedule(cfg);
  ClientState state(0, cfg.d, sched.num_layers());
  const std::vector<Vector> contexts{Vector::Zero(2), Vector::Zero(2)};
  const SelectionResult sel =
      slucb_select(state, sched, contexts, UpdateMode::lazy);
  CHECK(sel.action == 0);  // tie-break: lowest index
  CHECK(sel.layer == sched.S);
  CHECK(sel.width_at_selection == 0.0);
  CHECK(static_cast<int>(sel.candidate_trace.size()) == sched.num_layers());
}

TEST_CASE("lazy mode ignores pending observations, fresh mode prices them in") {
  const AlgoConfig cfg = tiny_cfg();
  const LayerSchedule sched = build_schedule(cfg);
  ClientState state(0, cfg.d, sched.num_layers());
  // Pile layer-0 evidence on arm 0's direction without syncing it.
  for (int k = 0; k < 100; ++k) slucb_update(state, 0, e(2, 0), 0.0);

  const std::vector<Vector> contexts{e(2, 0), e(2, 1)};
  const SelectionResult lazy =
      slucb_select(state, sched, contexts, UpdateMode::lazy);
  const SelectionResult fresh =
      slucb_select(state, sched, contexts, UpdateMode::fresh);

  // Lazily the two arms tie at width alpha_0 and the tie-break picks arm 0;
  // the pending rank-one mass shrinks arm 0's fresh width far below arm 1's.
  CHECK(lazy.action == 0);
  CHECK(fresh.action == 1);
  CHECK(fresh.width_at_selection > lazy.width_at_selection - 1e-12);
  CHECK(fresh.norm_at_selection == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("candidate traces are nested, nonempty, and contain the action") {
  RngStream rng(21);
  AlgoConfig cfg = tiny_cfg();
  cfg.d = 4;
  cfg.K = 6;
  cfg.T = 40000;  // small acceptance widths leave room to descend
  const LayerSchedule sched = build_schedule(cfg);
  ClientState state(0, cfg.d, sched.num_layers());

  for (int round = 0; round < 200; ++round) {
    std::vector<Vector> contexts;
    for (int a = 0; a < cfg.K; ++a) {
      Vector x(cfg.d);
      for (int i = 0; i < cfg.d; ++i) x[i] = rng.gaussian();
      x *= rng.uniform() / x.norm();
      contexts.push_back(x);
    }
    const SelectionResult sel =
        slucb_select(state, sched, contexts, UpdateMode::fresh);

    REQUIRE_FALSE(sel.candidate_trace.empty());
    for (std::size_t i = 0; i < sel.candidate_trace.size(); ++i) {
      const auto& trace = sel.candidate_trace[i];
      CHECK_FALSE(trace.arms.empty());
      CHECK(trace.rhat.size() == trace.arms.size());
      CHECK(trace.width.size() == trace.arms.size());
      if (i > 0) CHECK(is_subset(trace.arms, sel.candidate_trace[i - 1].arms));
    }
    const auto& last = sel.candidate_trace.back().arms;
    CHECK(std::find(last.begin(), last.end(), sel.action) != last.end());
    CHECK(sel.layer == sel.candidate_trace.back().layer);

    slucb_update(state, sel.layer, contexts[sel.action], rng.gaussian());
  }
}

TEST_CASE("selection is deterministic") {
  RngStream rng(77);
  AlgoConfig cfg = tiny_cfg();
  cfg.d = 3;
  cfg.K = 4;
  const LayerSchedule sched = build_schedule(cfg);
  ClientState state(0, cfg.d, sched.num_layers());
  for (int k = 0; k < 25; ++k) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x[i] = rng.gaussian();
    x *= rng.uniform() / x.norm();
    slucb_update(state, k % sched.num_layers(), x, rng.gaussian());
  }

  std::vector<Vector> contexts;
  for (int a = 0; a < cfg.K; ++a) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x[i] = rng.gaussian();
    x *= rng.uniform() / x.norm();
    contexts.push_back(x);
  }

  const SelectionResult a = slucb_select(state, sched, contexts, UpdateMode::fresh);
  const SelectionResult b = slucb_select(state, sched, contexts, UpdateMode::fresh);
  CHECK(a.action == b.action);
  CHECK(a.layer == b.layer);
  CHECK(a.width_at_selection == b.width_at_selection);
  CHECK(a.candidate_trace.size() == b.candidate_trace.size());
}

TEST_CASE("selection rejects malformed inputs") {
  const AlgoConfig cfg = tiny_cfg();
  const LayerSchedule sched = build_schedule(cfg);
  ClientState state(0, cfg.d, sched.num_layers());
  CHECK_THROWS_AS(slucb_select(state, sched, {}, UpdateMode::lazy),
                  std::invalid_argument);
  Vector bad = e(2, 0);
  bad[1] = std::nan("");
  CHECK_THROWS_AS(slucb_select(state, sched, {bad}, UpdateMode::lazy),
                  std::invalid_argument);
  ClientState wrong(0, cfg.d, sched.num_layers() + 1);
  CHECK_THROWS_AS(slucb_select(wrong, sched, {e(2, 0)}, UpdateMode::lazy),
                  std::invalid_argument);
}

TEST_CASE("updates land in exactly one pending layer") {
  ClientState state(0, 2, 3);
  slucb_update(state, 0, e(2, 0), 1.0);
  CHECK(state.pending[0].dgram(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(state.pending[0].dmoment[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(state.pending[0].num_updates == 1);
  CHECK(state.pending[1].zero());
  CHECK(state.pending[2].zero());
  // synced statistics untouched until a sync
  CHECK(state.synced[0].gram() == Matrix::Identity(2, 2));

  SUBCASE("zero context still counts as an update") {
    ClientState z(0, 2, 2);
    slucb_update(z, 0, Vector::Zero(2), 3.0);
    CHECK(z.pending[0].num_updates == 1);
    CHECK(z.pending[0].dgram == Matrix::Zero(2, 2));
  }

  SUBCASE("two updates on a deep layer leave the shallow ones empty") {
    ClientState s(0, 2, 3);
    slucb_update(s, 2, e(2, 0), 1.0);
    slucb_update(s, 2, e(2, 1), -1.0);
    CHECK(s.pending[2].num_updates == 2);
    CHECK(s.pending[0].zero());
    CHECK(s.pending[1].zero());
  }

  CHECK_THROWS_AS(slucb_update(state, 3, e(2, 0), 1.0), std::out_of_range);
  CHECK_THROWS_AS(slucb_update(state, -1, e(2, 0), 1.0), std::out_of_range);
}

TEST_CASE("variance-weighted updates scale by inverse sigma-bar squared") {
  ClientState unit(0, 2, 2);
  ClientState viav(0, 2, 2);
  slucb_update(unit, 0, e(2, 0), 1.0);
  vslucb_update(viav, 0, e(2, 0), 1.0, 1.0);
  CHECK(viav.pending[0].dgram == unit.pending[0].dgram);
  CHECK(viav.pending[0].dmoment == unit.pending[0].dmoment);

  ClientState s(0, 2, 2);
  vslucb_update(s, 0, e(2, 0), 1.0, 0.5);
  CHECK(s.pending[0].dgram(0, 0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(s.pending[0].dmoment[0] == doctest::Approx(4.0).epsilon(1e-15));

  ClientState t(0, 2, 2);
  vslucb_update(t, 0, e(2, 0), 2.0, 2.0);
  CHECK(t.pending[0].dgram(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(t.pending[0].dmoment[0] == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(vslucb_update(t, 0, e(2, 0), 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("distrust-weighted updates scale by eta") {
  ClientState unit(0, 2, 2);
  ClientState viac(0, 2, 2);
  slucb_update(unit, 0, e(2, 0), 1.0);
  cslucb_update(viac, 0, e(2, 0), 1.0, 1.0);
  CHECK(viac.pending[0].dgram == unit.pending[0].dgram);

  ClientState s(0, 2, 2);
  cslucb_update(s, 0, e(2, 0), 1.0, 0.4);
  CHECK(s.pending[0].dgram(0, 0) == doctest::Approx(0.4).epsilon(1e-15));

  ClientState t(0, 2, 2);
  cslucb_update(t, 0, e(2, 1), -1.0, 0.5);
  CHECK(t.pending[0].dmoment[1] == doctest::Approx(-0.5).epsilon(1e-15));

  CHECK_THROWS_AS(cslucb_update(t, 0, e(2, 0), 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cslucb_update(t, 0, e(2, 0), 1.0, 1.5), std::invalid_argument);
}
