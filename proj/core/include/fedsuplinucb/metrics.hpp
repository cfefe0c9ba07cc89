#pragma once

// Run logs, regret/communication accounting and CSV/JSON export.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fedsuplinucb/protocol.hpp"

namespace fedsup {

struct RoundRecord {
  long t = 0;        // round index (pull index in async, round in sync)
  int client = 0;
  int layer = 0;
  double inst_regret = 0.0;
  bool comm_event = false;
  int comm_participants = 0;
  double corruption = 0.0;
  double sigma_t = 0.0;
  bool has_sigma = false;
};

// Elliptical-potential accounting for one layer's global statistics:
// lhs = sum_t min(1, w_t * |x_t|^2_{A^{-1}}), rhs = 2 * (logdet_T - logdet_0).
struct PotentialCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

struct RunMeta {
  std::string algo;  // async | sync | variance | corruption | baseline
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;  // resolved echo, reruns bit-equal

  double final_regret = 0.0;
  bool regret_valid = true;  // false for realized-reward streams
  std::vector<double> per_client_regret;

  long comm_batches = 0;
  long comm_exchanges = 0;
  long comm_bytes = 0;

  long coverage_pairs = 0;       // (round, layer >= 1) pairs checked
  long coverage_violations = 0;  // pairs where some candidate broke its width
  std::vector<PotentialCheck> potential;  // per layer

  double realized_reward_sum = 0.0;   // realized-reward streams only
  double random_baseline_sum = 0.0;   // uniform-arm expectation, same stream

  double wall_ms = 0.0;
};

struct ExperimentLog {
  RunMeta meta;
  std::vector<RoundRecord> records;
  CommLog comm;
};

// Running regret by pull: (pull index, cumulative regret), one per record.
std::vector<std::pair<long, double>> cumulative_regret(const ExperimentLog& log);

// Cumulative communication aligned with records. Batches count sync rounds,
// exchanges count (client, batch) pairs.
struct CommSeries {
  std::vector<long> batch_cum;
  std::vector<long> exchange_cum;
};
CommSeries comm_cost(const ExperimentLog& log);

double total_regret(const ExperimentLog& log);
std::vector<double> per_client_regret(const ExperimentLog& log, int M);

// Least-squares slope of log(cum regret) vs log(pull) over the second half of
// the run. NaN when fewer than two usable points exist.
double regret_slope(const ExperimentLog& log);

enum class ExportFormat { csv, json };

// CSV columns, exactly:
//   t,client,layer,inst_regret,cum_regret,comm_batch_cum,comm_exchange_cum,corruption,sigma_t
// Floats are printed with 17 significant digits so a parse reproduces the
// stored doubles bit-exactly; sigma_t is empty for runs without a variance
// channel. JSON mirrors the same fields plus the meta block.
void export_log(const ExperimentLog& log, const std::filesystem::path& path,
                ExportFormat format);

// Reads back an exported CSV (header consistency enforced).
ExperimentLog import_csv(const std::filesystem::path& path);

std::string format_double(double v);  // %.17g

}  // namespace fedsup
