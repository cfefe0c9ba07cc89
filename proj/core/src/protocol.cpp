#include "fedsuplinucb/protocol.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace fedsup {
namespace {

//64-bit little-endian primitives. The host is little-endian on every target
// we build for; byte-swapping would go here otherwise.
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  put_u64(out, bits);
}

struct Reader {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;

  std::uint64_t u64() {
    if (pos + 8 > buf.size()) {
      throw std::invalid_argument("message truncated");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(buf[pos + i]) << (8 * i);
    }
    pos += 8;
    return v;
  }

  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

  void done() const {
    if (pos != buf.size()) {
      throw std::invalid_argument("trailing bytes in message");
    }
  }
};

void put_upper_triangle(std::vector<std::uint8_t>& out, const Matrix& m) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = r; c < m.cols(); ++c) put_f64(out, m(r, c));
  }
}

Matrix read_upper_triangle(Reader& in, int dim) {
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = r; c < dim; ++c) {
      m(r, c) = in.f64();
      m(c, r) = m(r, c);
    }
  }
  return m;
}

int read_dim(Reader& in) {
  const auto dim = static_cast<std::int64_t>(in.u64());
  if (dim < 1 || dim > (1 << 20)) {
    throw std::invalid_argument("implausible dimension in message: " +
                                std::to_string(dim));
  }
  return static_cast<int>(dim);
}

}  // namespace

ServerState::ServerState(int dim, int num_layers, double lambda) {
  if (num_layers < 1) {
    throw std::invalid_argument("server needs at least one layer");
  }
  layers.reserve(num_layers);
  for (int s = 0; s < num_layers; ++s) layers.emplace_back(dim, lambda);
}

std::vector<std::uint8_t> serialize(const UploadMessage& msg) {
  std::vector<std::uint8_t> out;
  const int d = msg.delta.dim();
  out.reserve(8 * (4 + d * (d + 1) / 2 + d));
  put_u64(out, static_cast<std::uint64_t>(d));
  put_u64(out, static_cast<std::uint64_t>(msg.client_id));
  put_u64(out, static_cast<std::uint64_t>(msg.layer));
  put_u64(out, static_cast<std::uint64_t>(msg.delta.num_updates));
  put_upper_triangle(out, msg.delta.dgram);
  for (int i = 0; i < d; ++i) put_f64(out, msg.delta.dmoment(i));
  return out;
}

std::vector<std::uint8_t> serialize(const DownloadMessage& msg) {
  std::vector<std::uint8_t> out;
  const int d = static_cast<int>(msg.moment.size());
  out.reserve(8 * (2 + d * (d + 1) / 2 + d));
  put_u64(out, static_cast<std::uint64_t>(d));
  put_u64(out, static_cast<std::uint64_t>(msg.layer));
  put_upper_triangle(out, msg.gram);
  for (int i = 0; i < d; ++i) put_f64(out, msg.moment(i));
  return out;
}

UploadMessage parse_upload(const std::vector<std::uint8_t>& bytes) {
  Reader in{bytes};
  const int d = read_dim(in);
  UploadMessage msg{0, 0, DeltaStats(d)};
  msg.client_id = static_cast<std::int64_t>(in.u64());
  msg.layer = static_cast<std::int64_t>(in.u64());
  msg.delta.num_updates = static_cast<long>(in.u64());
  msg.delta.dgram = read_upper_triangle(in, d);
  for (int i = 0; i < d; ++i) msg.delta.dmoment(i) = in.f64();
  in.done();
  return msg;
}

DownloadMessage parse_download(const std::vector<std::uint8_t>& bytes) {
  Reader in{bytes};
  const int d = read_dim(in);
  DownloadMessage msg;
  msg.layer = static_cast<std::int64_t>(in.u64());
  msg.gram = read_upper_triangle(in, d);
  msg.moment = Vector(d);
  for (int i = 0; i < d; ++i) msg.moment(i) = in.f64();
  in.done();
  return msg;
}

long CommLog::exchange_count() const {
  long count = 0;
  long round = -1;
  std::vector<int> seen;  // clients already counted this round
  for (const auto& e : events) {
    if (e.round != round) {
      round = e.round;
      seen.clear();
    }
    bool counted = false;
    for (int c : seen) {
      if (c == e.client) {
        counted = true;
        break;
      }
    }
    if (!counted) {
      seen.push_back(e.client);
      ++count;
    }
  }
  return count;
}

long CommLog::batch_count() const {
  long count = 0;
  long round = -1;
  for (const auto& e : events) {
    if (e.round != round) {
      round = e.round;
      ++count;
    }
  }
  return count;
}

long CommLog::total_bytes() const {
  long sum = 0;
  for (const auto& e : events) sum += e.bytes;
  return sum;
}

bool async_trigger(const RidgeStats& synced, const DeltaStats& pending,
                   double c) {
  if (std::isnan(c) || c < 0.0) {
    throw std::invalid_argument("async trigger threshold must be >= 0");
  }
  return synced.log_det_ratio(pending) > std::log1p(c);
}

bool sync_trigger(const RidgeStats& synced, const DeltaStats& pending, long t,
                  long t_last, double d_threshold) {
  if (std::isnan(d_threshold) || d_threshold < 0.0) {
    throw std::invalid_argument("sync trigger threshold must be >= 0");
  }
  if (t < t_last) {
    throw std::invalid_argument("sync trigger saw t < t_last");
  }
  const double staleness = static_cast<double>(t - t_last);
  return staleness * synced.log_det_ratio(pending) > d_threshold;
}

void sync_layer(ServerState& server, const std::vector<ClientState*>& participants,
                int layer, long round, CommLog& log, MessageLog* messages) {
  if (layer < 0 || layer >= server.num_layers()) {
    throw std::out_of_range("sync_layer: layer " + std::to_string(layer) +
                            " outside [0, " +
                            std::to_string(server.num_layers()) + ")");
  }
  for (ClientState* p : participants) {
    if (p == nullptr) throw std::invalid_argument("null participant");
    if (p->num_layers() != server.num_layers() || p->dim() != server.dim()) {
      throw std::invalid_argument("participant shape does not match server");
    }
  }

  RidgeStats& agg = server.layers[layer];
  for (ClientState* p : participants) {
    if (messages != nullptr) {
      messages->uploads.push_back({p->id, layer, p->pending[layer]});
    }
    agg.merge(p->pending[layer]);
  }
  const long bytes = 2 * payload_reals(server.dim()) * 8;
  for (ClientState* p : participants) {
    p->synced[layer] = agg;
    p->pending[layer].clear();
    log.events.push_back({round, layer, p->id, bytes});
    if (messages != nullptr) {
      messages->downloads.push_back({layer, agg.gram(), agg.moment()});
    }
  }
}

}  // namespace fedsup
