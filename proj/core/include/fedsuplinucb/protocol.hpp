#pragma once

// Star-topology synchronization protocol.
//
// Clients decide unilaterally when to talk, using determinant-ratio triggers
// on their pending deltas. A synchronization of one layer uploads every
// participant's delta, merges them into the server's aggregate, downloads the
// merged statistics back and clears the deltas. The communication log records
// one event per (participant, layer); reporting collapses events to one
// exchange per (round, client) and one batch per round, and additionally
// charges d(d+1)/2 + d reals per layer per direction as a bytes-equivalent.

#include <cstdint>
#include <vector>

#include "fedsuplinucb/client.hpp"
#include "fedsuplinucb/linalg.hpp"

namespace fedsup {

struct ServerState {
  std::vector<RidgeStats> layers;

  ServerState(int dim, int num_layers, double lambda = 1.0);
  int dim() const { return layers.empty() ? 0 : layers.front().dim(); }
  int num_layers() const { return static_cast<int>(layers.size()); }
};

struct UploadMessage {
  std::int64_t client_id = 0;
  std::int64_t layer = 0;
  DeltaStats delta;
};

struct DownloadMessage {
  std::int64_t layer = 0;
  Matrix gram;
  Vector moment;
};

// Canonical wire format: fields in declaration order, 64-bit little-endian
// integers and floats, symmetric matrices packed as the upper triangle in
// row-major order. Replay tooling depends on these bytes, change nothing.
std::vector<std::uint8_t> serialize(const UploadMessage& msg);
std::vector<std::uint8_t> serialize(const DownloadMessage& msg);
UploadMessage parse_upload(const std::vector<std::uint8_t>& bytes);
DownloadMessage parse_download(const std::vector<std::uint8_t>& bytes);

struct CommEvent {
  long round = 0;
  int layer = 0;
  int client = 0;
  long bytes = 0;
};

struct CommLog {
  std::vector<CommEvent> events;

  // One exchange per distinct (round, client): an async full-state sync and a
  // sync-mode multi-layer batch both cost a client one exchange.
  long exchange_count() const;
  // One batch per distinct round with any traffic.
  long batch_count() const;
  long total_bytes() const;
};

// Optional capture of the actual messages, for replay and conservation tests.
struct MessageLog {
  std::vector<UploadMessage> uploads;
  std::vector<DownloadMessage> downloads;
};

// det(A + dA) / det(A) > 1 + c, evaluated in log space. c == +inf never fires.
bool async_trigger(const RidgeStats& synced, const DeltaStats& pending,
                   double c);

// (t - t_last) * log(det(A + dA) / det(A)) > d_threshold. Requires t >= t_last.
bool sync_trigger(const RidgeStats& synced, const DeltaStats& pending, long t,
                  long t_last, double d_threshold);

// Uploads every participant's pending delta for `layer`, merges into the
// server, downloads the merged stats to every participant and clears their
// deltas. Appends one CommEvent per participant.
void sync_layer(ServerState& server, const std::vector<ClientState*>& participants,
                int layer, long round, CommLog& log,
                MessageLog* messages = nullptr);

// Payload size charged per layer per direction, in reals.
inline long payload_reals(int dim) {
  return static_cast<long>(dim) * (dim + 1) / 2 + dim;
}

}  // namespace fedsup
