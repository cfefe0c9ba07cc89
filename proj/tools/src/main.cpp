// fedsup: experiment runner for the federated bandit library.
//
//   fedsup run    --algo async --preset desk --seeds 1..10 --out runs/
//   fedsup sweep  --algo async --axis C --values 0.01,0.1,1 --out sweep/
//   fedsup report runs/summary.json other/summary.json
//
// A run is a pure function of (resolved config, seed): the summary echoes
// every resolved parameter, and feeding the echo back reproduces the CSVs
// byte for byte. Precedence: preset < --config file < --override < flags.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fedsuplinucb/orchestrator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fedsup;

namespace {

constexpr const char* kSummarySchema = "fedsup-summary-v1";

struct EnvSpec {
  std::string kind = "synthetic";  // synthetic | stream | realized
  std::string noise = "gaussian";  // none | gaussian | bounded
  double sigma = 0.1;
  std::string sigma_values;        // bounded schedule, comma separated
  double theta_scale = 1.0;
  std::string stream_path;
  std::string adversary = "none";  // none | sign_flip | targeted
  double adversary_budget = 0.0;
};

struct RunSpec {
  std::string algo = "async";
  AlgoConfig cfg;
  EnvSpec env;
  std::string pattern = "round_robin";
  std::string format = "csv";
  std::vector<std::uint64_t> seeds{1};
  fs::path out = "runs";
  int jobs = 1;
};

[[noreturn]] void fail(const std::string& msg) {
  throw CLI::ValidationError(msg);
}

double parse_num(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail("field '" + key + "': cannot parse number from '" + value + "'");
  }
}

long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail("field '" + key + "': cannot parse integer from '" + value + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// "1..5" (inclusive), "1,4,9", or a single number.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const long lo = parse_int("seeds", text.substr(0, dots));
    const long hi = parse_int("seeds", text.substr(dots + 2));
    if (lo < 0 || hi < lo) fail("field 'seeds': bad range '" + text + "'");
    for (long s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  } else {
    for (const auto& part : split(text, ',')) {
      const long s = parse_int("seeds", trim(part));
      if (s < 0) fail("field 'seeds': negative seed");
      seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  if (seeds.empty()) fail("field 'seeds': empty list");
  return seeds;
}

// Accepts dotted keys (algo.d, env.sigma, run.pattern) and the bare aliases
// used throughout the docs (d, sigma, pattern, ...).
void apply_kv(RunSpec& spec, const std::string& raw_key, const std::string& value) {
  std::string key = raw_key;
  const auto dot = key.find('.');
  std::string section;
  if (dot != std::string::npos) {
    section = key.substr(0, dot);
    key = key.substr(dot + 1);
  }

  auto in = [&](const char* s) { return section.empty() || section == s; };

  if (in("algo")) {
    if (key == "d") { spec.cfg.d = static_cast<int>(parse_int(raw_key, value)); return; }
    if (key == "K") { spec.cfg.K = static_cast<int>(parse_int(raw_key, value)); return; }
    if (key == "M") { spec.cfg.M = static_cast<int>(parse_int(raw_key, value)); return; }
    if (key == "T") { spec.cfg.T = parse_int(raw_key, value); return; }
    if (key == "delta") { spec.cfg.delta = parse_num(raw_key, value); return; }
    if (key == "C") { spec.cfg.C = parse_num(raw_key, value); return; }
    if (key == "D") { spec.cfg.D = parse_num(raw_key, value); return; }
    if (key == "R") { spec.cfg.R = parse_num(raw_key, value); return; }
    if (key == "Cp") { spec.cfg.Cp = parse_num(raw_key, value); return; }
    if (key == "ridge_lambda") { spec.cfg.ridge_lambda = parse_num(raw_key, value); return; }
  }
  if (in("env")) {
    if (key == "kind") { spec.env.kind = value; return; }
    if (key == "noise") { spec.env.noise = value; return; }
    if (key == "sigma") { spec.env.sigma = parse_num(raw_key, value); return; }
    if (key == "sigma_values") { spec.env.sigma_values = value; return; }
    if (key == "theta_scale") { spec.env.theta_scale = parse_num(raw_key, value); return; }
    if (key == "stream") { spec.env.stream_path = value; return; }
    if (key == "adversary") { spec.env.adversary = value; return; }
    if (key == "adversary_budget") { spec.env.adversary_budget = parse_num(raw_key, value); return; }
  }
  if (in("run")) {
    if (key == "pattern") { spec.pattern = value; return; }
    if (key == "format") { spec.format = value; return; }
  }
  fail("unknown configuration field '" + raw_key + "'");
}

void apply_preset(RunSpec& spec, const std::string& name) {
  if (name == "paper-synthetic") {
    spec.cfg.d = 25;
    spec.cfg.K = 20;
    spec.cfg.M = 20;
    spec.cfg.T = 40000;
    spec.cfg.delta = 0.05;
    spec.env.noise = "gaussian";
    spec.env.sigma = 0.01;
    spec.pattern = "round_robin";
    return;
  }
  if (name == "desk") {
    spec.cfg.d = 10;
    spec.cfg.K = 10;
    spec.cfg.M = 5;
    spec.cfg.T = 20000;
    spec.cfg.delta = 0.05;
    spec.env.noise = "gaussian";
    spec.env.sigma = 0.1;
    spec.pattern = "round_robin";
    return;
  }
  fail("unknown preset '" + name + "' (expected paper-synthetic or desk)");
}

// key = value lines, '#' comments, dotted keys as in --override.
void load_config_file(RunSpec& spec, const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path.string());
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(path.string() + ":" + std::to_string(row) + ": expected key = value");
    }
    apply_kv(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

NoiseModel make_noise(const RunSpec& spec) {
  const auto& e = spec.env;
  if (e.noise == "none") return NoiseModel::none();
  if (e.noise == "gaussian") return NoiseModel::gaussian(e.sigma);
  if (e.noise == "bounded") {
    SigmaSchedule sched;
    if (e.sigma_values.empty()) {
      sched = SigmaSchedule::constant(e.sigma);
    } else {
      sched.values.clear();
      for (const auto& part : split(e.sigma_values, ',')) {
        sched.values.push_back(parse_num("env.sigma_values", trim(part)));
      }
    }
    return NoiseModel::bounded_hetero(spec.cfg.R, sched);
  }
  fail("field 'env.noise': unknown kind '" + e.noise + "'");
}

LinearEnv build_env(const RunSpec& spec, std::uint64_t seed) {
  const auto& e = spec.env;
  LinearEnv env = [&] {
    if (e.kind == "realized") {
      if (e.stream_path.empty()) fail("field 'env.stream': realized runs need a stream file");
      return LinearEnv::from_realized(load_context_stream(e.stream_path));
    }
    RngStream theta_rng = derive_stream(seed, "theta");
    Vector theta = sample_sphere(spec.cfg.d, theta_rng, e.theta_scale);
    if (e.kind == "stream") {
      if (e.stream_path.empty()) fail("field 'env.stream': stream runs need a stream file");
      return LinearEnv::with_stream(std::move(theta), make_noise(spec),
                                    load_context_stream(e.stream_path));
    }
    if (e.kind != "synthetic") fail("field 'env.kind': unknown kind '" + e.kind + "'");
    return LinearEnv::synthetic(std::move(theta), make_noise(spec));
  }();

  if (e.adversary != "none") {
    CorruptionStrategy strategy;
    if (e.adversary == "sign_flip") {
      strategy = CorruptionStrategy::sign_flip_prefix;
    } else if (e.adversary == "targeted") {
      strategy = CorruptionStrategy::targeted_best_arm;
    } else {
      fail("field 'env.adversary': unknown strategy '" + e.adversary + "'");
    }
    env.attach_adversary(CorruptionAdversary(strategy, e.adversary_budget));
  }
  return env;
}

ArrivalKind parse_pattern(const std::string& name) {
  if (name == "round_robin" || name == "round-robin") return ArrivalKind::round_robin;
  if (name == "random") return ArrivalKind::random;
  if (name == "click_leave" || name == "click-leave") return ArrivalKind::click_leave;
  fail("field 'run.pattern': unknown pattern '" + name + "'");
}

Variant variant_for(const std::string& algo) {
  if (algo == "variance") return Variant::variance_adaptive;
  if (algo == "corruption") return Variant::corruption_robust;
  return Variant::standard;
}

ExperimentLog run_one(const RunSpec& spec, std::uint64_t seed) {
  AlgoConfig cfg = spec.cfg;
  cfg.variant = variant_for(spec.algo);
  if (spec.algo == "baseline") cfg.M = 1;

  const LinearEnv env = build_env(spec, seed);
  RunOptions opts;
  opts.seed = seed;

  if (spec.algo == "sync") return run_sync(cfg, env, opts);
  if (spec.algo == "baseline") return run_baseline_suplinucb(cfg, env, opts);

  RngStream arrivals = derive_stream(seed, "arrivals");
  const ArrivalPattern pattern =
      make_arrivals(parse_pattern(spec.pattern), cfg.M, cfg.T, arrivals);
  if (spec.algo == "async") return run_async(cfg, env, pattern, opts);
  if (spec.algo == "variance") return run_variance_adaptive(cfg, env, pattern, opts);
  if (spec.algo == "corruption") return run_corruption_robust(cfg, env, pattern, opts);
  fail("unknown algo '" + spec.algo +
       "' (expected async, sync, variance, corruption or baseline)");
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json spec_echo(const RunSpec& spec) {
  json j;
  j["algo"] = spec.algo;
  j["pattern"] = spec.pattern;
  j["format"] = spec.format;
  j["env"] = {{"kind", spec.env.kind},
              {"noise", spec.env.noise},
              {"sigma", spec.env.sigma},
              {"sigma_values", spec.env.sigma_values},
              {"theta_scale", spec.env.theta_scale},
              {"stream", spec.env.stream_path},
              {"adversary", spec.env.adversary},
              {"adversary_budget", spec.env.adversary_budget}};
  return j;
}

// Runs every seed (parallel up to spec.jobs), exports one log per seed and
// returns the summary document.
json run_all_seeds(const RunSpec& spec, const std::string& file_tag) {
  fs::create_directories(spec.out);

  const std::size_t n = spec.seeds.size();
  std::vector<json> rows(n);
  std::vector<std::map<std::string, std::string>> echoes(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        const std::uint64_t seed = spec.seeds[i];
        const ExperimentLog log = run_one(spec, seed);
        const std::string name =
            file_tag + "-seed" + std::to_string(seed) +
            (spec.format == "json" ? ".json" : ".csv");
        export_log(log, spec.out / name,
                   spec.format == "json" ? ExportFormat::json : ExportFormat::csv);

        json row;
        row["seed"] = seed;
        row["file"] = name;
        row["final_regret"] = log.meta.final_regret;
        row["regret_valid"] = log.meta.regret_valid;
        row["per_client_regret"] = log.meta.per_client_regret;
        row["comm_batches"] = log.meta.comm_batches;
        row["comm_exchanges"] = log.meta.comm_exchanges;
        row["comm_bytes"] = log.meta.comm_bytes;
        row["coverage_pairs"] = log.meta.coverage_pairs;
        row["coverage_violations"] = log.meta.coverage_violations;
        row["regret_slope"] = regret_slope(log);
        row["wall_ms"] = log.meta.wall_ms;
        if (!log.meta.regret_valid) {
          row["realized_reward_sum"] = log.meta.realized_reward_sum;
          row["random_baseline_sum"] = log.meta.random_baseline_sum;
        }
        rows[i] = std::move(row);
        echoes[i] = log.meta.config;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  json summary;
  summary["schema"] = kSummarySchema;
  summary["algo"] = spec.algo;
  summary["spec"] = spec_echo(spec);
  auto resolved = echoes.front();  // identical across seeds except the seed itself
  resolved.erase("seed");
  summary["resolved"] = resolved;
  summary["seeds"] = rows;

  std::vector<double> regret, batches, exchanges, slopes;
  for (const auto& row : rows) {
    regret.push_back(row["final_regret"].get<double>());
    batches.push_back(row["comm_batches"].get<double>());
    exchanges.push_back(row["comm_exchanges"].get<double>());
    const double s = row["regret_slope"].is_number()
                         ? row["regret_slope"].get<double>()
                         : std::nan("");
    if (std::isfinite(s)) slopes.push_back(s);
  }
  summary["median_final_regret"] = median(regret);
  summary["median_comm_batches"] = median(batches);
  summary["median_comm_exchanges"] = median(exchanges);
  if (!slopes.empty()) summary["median_regret_slope"] = median(slopes);
  return summary;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// NaN-safe columns for the text tables.
std::string num_or_dash(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) return "-";
  std::ostringstream ss;
  ss << j[key].get<double>();
  return ss.str();
}

int cmd_run(const RunSpec& spec) {
  const json summary = run_all_seeds(spec, spec.algo);
  write_json(summary, spec.out / "summary.json");
  std::cout << "algo=" << spec.algo << " seeds=" << spec.seeds.size()
            << " median_regret=" << num_or_dash(summary, "median_final_regret")
            << " median_exchanges="
            << num_or_dash(summary, "median_comm_exchanges") << "\n"
            << "summary: " << (spec.out / "summary.json").string() << "\n";
  return 0;
}

int cmd_sweep(const RunSpec& base, const std::string& axis,
              const std::string& values_text) {
  static const std::vector<std::string> kAxes = {"C", "D", "M", "sigma", "Cp"};
  if (std::find(kAxes.begin(), kAxes.end(), axis) == kAxes.end()) {
    fail("sweep axis '" + axis + "' is not numeric-sweepable (C, D, M, sigma, Cp)");
  }
  std::vector<double> values;
  for (const auto& part : split(values_text, ',')) {
    const auto v = trim(part);
    if (!v.empty()) values.push_back(parse_num("values", v));
  }
  if (values.empty()) fail("sweep needs a nonempty --values list");

  json sweep;
  sweep["schema"] = kSummarySchema;
  sweep["algo"] = base.algo;
  sweep["axis"] = axis;
  json points = json::array();

  std::cout << axis << "\tTc\tmedian_regret\tmedian_per_client\t"
            << "median_exchanges\tmedian_batches\n";
  for (double value : values) {
    RunSpec spec = base;
    std::ostringstream val;
    val << value;
    const std::string key = axis == "sigma" ? "env.sigma" : "algo." + axis;
    apply_kv(spec, key, val.str());

    const std::string tag = base.algo + "-" + axis + val.str();
    json summary = run_all_seeds(spec, tag);

    // Per-client regret (mean over clients), the Fig. 1(c)-style axis.
    std::vector<double> per_client;
    for (const auto& row : summary["seeds"]) {
      const auto& pc = row["per_client_regret"];
      double sum = 0.0;
      for (const auto& v : pc) sum += v.get<double>();
      if (!pc.empty()) per_client.push_back(sum / static_cast<double>(pc.size()));
    }

    json point;
    point["value"] = value;
    point["Tc"] = spec.cfg.T / std::max(1, spec.cfg.M);
    point["median_final_regret"] = summary["median_final_regret"];
    point["median_per_client_regret"] = median(per_client);
    point["median_comm_exchanges"] = summary["median_comm_exchanges"];
    point["median_comm_batches"] = summary["median_comm_batches"];
    point["summary"] = summary;
    std::cout << value << '\t' << point["Tc"].get<long>() << '\t'
              << num_or_dash(point, "median_final_regret") << '\t'
              << num_or_dash(point, "median_per_client_regret") << '\t'
              << num_or_dash(point, "median_comm_exchanges") << '\t'
              << num_or_dash(point, "median_comm_batches") << '\n';
    points.push_back(std::move(point));
  }
  sweep["points"] = std::move(points);
  fs::create_directories(base.out);
  write_json(sweep, base.out / "sweep.json");
  std::cout << "sweep: " << (base.out / "sweep.json").string() << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& paths, const std::string& json_out) {
  json merged = json::array();
  std::cout << "file\talgo\tM\tT\tmedian_regret\tmedian_exchanges\t"
            << "median_batches\tslope\n";
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) fail("cannot open summary " + p);
    json j;
    try {
      j = json::parse(in);
    } catch (const std::exception& e) {
      fail("cannot parse " + p + ": " + e.what());
    }
    if (!j.contains("schema") || j["schema"] != kSummarySchema) {
      fail("summary schema mismatch in " + p);
    }

    json row;
    row["file"] = p;
    row["algo"] = j.value("algo", "?");
    const auto& resolved = j.contains("resolved") ? j["resolved"] : json::object();
    row["M"] = resolved.value("M", "?");
    row["T"] = resolved.value("T", "?");
    row["median_final_regret"] = j.value("median_final_regret", json());
    row["median_comm_exchanges"] = j.value("median_comm_exchanges", json());
    row["median_comm_batches"] = j.value("median_comm_batches", json());
    row["median_regret_slope"] = j.value("median_regret_slope", json());
    std::cout << p << '\t' << row["algo"].get<std::string>() << '\t'
              << row["M"].get<std::string>() << '\t'
              << row["T"].get<std::string>() << '\t'
              << num_or_dash(row, "median_final_regret") << '\t'
              << num_or_dash(row, "median_comm_exchanges") << '\t'
              << num_or_dash(row, "median_comm_batches") << '\t'
              << num_or_dash(row, "median_regret_slope") << '\n';
    merged.push_back(std::move(row));
  }
  if (!json_out.empty()) write_json(merged, json_out);
  return 0;
}

void add_common_flags(CLI::App* cmd, RunSpec& spec, std::string& preset,
                      std::string& config_file, std::string& seeds_text,
                      std::vector<std::string>& overrides) {
  cmd->add_option("--algo", spec.algo,
                  "async | sync | variance | corruption | baseline");
  cmd->add_option("--preset", preset, "paper-synthetic | desk");
  cmd->add_option("--config", config_file, "key = value config file");
  cmd->add_option("--override", overrides, "field=value, repeatable")
      ->take_all();
  cmd->add_option("--seeds", seeds_text, "e.g. 1..10 or 3,5,8 (default 1)");
  cmd->add_option("--out", spec.out, "output directory");
  cmd->add_option("--jobs", spec.jobs, "parallel seed jobs")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--pattern", spec.pattern,
                  "round_robin | random | click_leave");
}

void resolve_spec(RunSpec& spec, const std::string& preset,
                  const std::string& config_file, const std::string& seeds_text,
                  const std::vector<std::string>& overrides, CLI::App* cmd) {
  // Re-apply in precedence order; flags seen by CLI11 win over everything,
  // so capture them, resolve the layered sources, then restore.
  const RunSpec flag_values = spec;
  if (!preset.empty()) apply_preset(spec, preset);
  if (!config_file.empty()) load_config_file(spec, config_file);
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) fail("--override expects field=value, got '" + ov + "'");
    apply_kv(spec, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
  }
  if (cmd->count("--pattern") > 0) spec.pattern = flag_values.pattern;
  if (cmd->count("--algo") > 0) spec.algo = flag_values.algo;
  if (cmd->count("--out") > 0) spec.out = flag_values.out;
  if (cmd->count("--jobs") > 0) spec.jobs = flag_values.jobs;
  if (!seeds_text.empty()) spec.seeds = parse_seeds(seeds_text);

  static const std::vector<std::string> kAlgos = {"async", "sync", "variance",
                                                  "corruption", "baseline"};
  if (std::find(kAlgos.begin(), kAlgos.end(), spec.algo) == kAlgos.end()) {
    fail("unknown algo '" + spec.algo +
         "' (expected async, sync, variance, corruption or baseline)");
  }
  if (spec.algo == "variance" && spec.env.noise != "bounded") {
    fail("variance runs need env.noise = bounded (the variance channel)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"federated linear bandit experiment runner"};
  app.require_subcommand(1);

  RunSpec run_spec, sweep_spec;
  std::string run_preset, run_config, run_seeds;
  std::string sweep_preset, sweep_config, sweep_seeds;
  std::vector<std::string> run_overrides, sweep_overrides;
  std::string sweep_axis, sweep_values;
  std::vector<std::string> report_paths;
  std::string report_json;

  CLI::App* run = app.add_subcommand("run", "execute one spec across seeds");
  add_common_flags(run, run_spec, run_preset, run_config, run_seeds, run_overrides);

  CLI::App* sweep = app.add_subcommand("sweep", "run a spec across one axis");
  add_common_flags(sweep, sweep_spec, sweep_preset, sweep_config, sweep_seeds,
                   sweep_overrides);
  sweep->add_option("--axis", sweep_axis, "C | D | M | sigma | Cp")->required();
  sweep->add_option("--values", sweep_values, "comma separated numbers")->required();

  CLI::App* report = app.add_subcommand("report", "merge summary JSONs");
  report->add_option("paths", report_paths, "summary.json files")->required();
  report->add_option("--json", report_json, "write the merged table here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      resolve_spec(run_spec, run_preset, run_config, run_seeds, run_overrides, run);
      return cmd_run(run_spec);
    }
    if (sweep->parsed()) {
      resolve_spec(sweep_spec, sweep_preset, sweep_config, sweep_seeds,
                   sweep_overrides, sweep);
      return cmd_sweep(sweep_spec, sweep_axis, sweep_values);
    }
    if (report->parsed()) {
      return cmd_report(report_paths, report_json);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
