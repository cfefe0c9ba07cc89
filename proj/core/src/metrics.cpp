#include "fedsuplinucb/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fedsup {
namespace {

constexpr const char* kCsvHeader =
    "t,client,layer,inst_regret,cum_regret,comm_batch_cum,comm_exchange_cum,"
    "corruption,sigma_t";

nlohmann::json meta_to_json(const RunMeta& meta) {
  nlohmann::json j;
  j["algo"] = meta.algo;
  j["seed"] = meta.seed;
  j["config"] = meta.config;
  j["final_regret"] = meta.final_regret;
  j["regret_valid"] = meta.regret_valid;
  j["per_client_regret"] = meta.per_client_regret;
  j["comm_batches"] = meta.comm_batches;
  j["comm_exchanges"] = meta.comm_exchanges;
  j["comm_bytes"] = meta.comm_bytes;
  j["coverage_pairs"] = meta.coverage_pairs;
  j["coverage_violations"] = meta.coverage_violations;
  auto potential = nlohmann::json::array();
  for (const auto& p : meta.potential) {
    potential.push_back({{"lhs", p.lhs}, {"rhs", p.rhs}});
  }
  j["potential"] = potential;
  if (!meta.regret_valid) {
    j["realized_reward_sum"] = meta.realized_reward_sum;
    j["random_baseline_sum"] = meta.random_baseline_sum;
  }
  j["wall_ms"] = meta.wall_ms;
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::pair<long, double>> cumulative_regret(const ExperimentLog& log) {
  std::vector<std::pair<long, double>> series;
  series.reserve(log.records.size());
  double cum = 0.0;
  long pull = 0;
  for (const auto& r : log.records) {
    cum += r.inst_regret;
    series.emplace_back(++pull, cum);
  }
  return series;
}

CommSeries comm_cost(const ExperimentLog& log) {
  CommSeries series;
  series.batch_cum.reserve(log.records.size());
  series.exchange_cum.reserve(log.records.size());
  long batches = 0;
  long exchanges = 0;
  for (const auto& r : log.records) {
    if (r.comm_event) {
      ++batches;
      exchanges += r.comm_participants;
    }
    series.batch_cum.push_back(batches);
    series.exchange_cum.push_back(exchanges);
  }
  return series;
}

double total_regret(const ExperimentLog& log) {
  double cum = 0.0;
  for (const auto& r : log.records) cum += r.inst_regret;
  return cum;
}

std::vector<double> per_client_regret(const ExperimentLog& log, int M) {
  std::vector<double> out(static_cast<std::size_t>(M), 0.0);
  for (const auto& r : log.records) {
    if (r.client < 0 || r.client >= M) {
      throw std::out_of_range("record client id outside [0, M)");
    }
    out[static_cast<std::size_t>(r.client)] += r.inst_regret;
  }
  return out;
}

double regret_slope(const ExperimentLog& log) {
  const auto series = cumulative_regret(log);
  const std::size_t n = series.size();
  if (n < 4) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long used = 0;
  for (std::size_t i = n / 2; i < n; ++i) {
    if (series[i].second <= 0.0) continue;
    const double x = std::log(static_cast<double>(series[i].first));
    const double y = std::log(series[i].second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 2) return std::nan("");
  const double denom = used * sxx - sx * sx;
  if (denom == 0.0) return std::nan("");
  return (used * sxy - sx * sy) / denom;
}

void export_log(const ExperimentLog& log, const std::filesystem::path& path,
                ExportFormat format) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write log to " + path.string());
  }
  const auto comm = comm_cost(log);

  if (format == ExportFormat::csv) {
    out << kCsvHeader << '\n';
    double cum = 0.0;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
      const auto& r = log.records[i];
      cum += r.inst_regret;
      out << r.t << ',' << r.client << ',' << r.layer << ','
          << format_double(r.inst_regret) << ',' << format_double(cum) << ','
          << comm.batch_cum[i] << ',' << comm.exchange_cum[i] << ','
          << format_double(r.corruption) << ',';
      if (r.has_sigma) out << format_double(r.sigma_t);
      out << '\n';
    }
    return;
  }

  nlohmann::json j;
  j["meta"] = meta_to_json(log.meta);
  auto records = nlohmann::json::array();
  double cum = 0.0;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& r = log.records[i];
    cum += r.inst_regret;
    nlohmann::json jr;
    jr["t"] = r.t;
    jr["client"] = r.client;
    jr["layer"] = r.layer;
    jr["inst_regret"] = r.inst_regret;
    jr["cum_regret"] = cum;
    jr["comm_batch_cum"] = comm.batch_cum[i];
    jr["comm_exchange_cum"] = comm.exchange_cum[i];
    jr["corruption"] = r.corruption;
    if (r.has_sigma) {
      jr["sigma_t"] = r.sigma_t;
    } else {
      jr["sigma_t"] = nullptr;
    }
    records.push_back(std::move(jr));
  }
  j["records"] = std::move(records);
  out << j.dump(2) << '\n';
}

ExperimentLog import_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read log from " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) ||
      (!line.empty() && line.back() == '\r' ? line.substr(0, line.size() - 1)
                                            : line) != kCsvHeader) {
    throw std::invalid_argument("log CSV header mismatch in " + path.string());
  }
  ExperimentLog log;
  long row = 1;
  long prev_batch = 0;
  long prev_exch = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        f.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur.push_back(ch);
      }
    }
    f.push_back(cur);
    if (f.size() != 9) {
      throw std::invalid_argument("log CSV row " + std::to_string(row) +
                                  " has " + std::to_string(f.size()) +
                                  " fields, expected 9");
    }
    RoundRecord r;
    r.t = std::stol(f[0]);
    r.client = std::stoi(f[1]);
    r.layer = std::stoi(f[2]);
    r.inst_regret = std::stod(f[3]);
    const long batch = std::stol(f[5]);
    const long exch = std::stol(f[6]);
    r.corruption = std::stod(f[7]);
    if (!f[8].empty()) {
      r.sigma_t = std::stod(f[8]);
      r.has_sigma = true;
    }
    // The comm flags fold into the cumulative columns on export; unfold them.
    if (batch > prev_batch) {
      r.comm_event = true;
      r.comm_participants = static_cast<int>(exch - prev_exch);
    }
    prev_batch = batch;
    prev_exch = exch;
    log.records.push_back(r);
  }
  return log;
}

}  // namespace fedsup
