#include "fedsuplinucb/rng.hpp"

namespace fedsup {
namespace {

// splitmix64 finalizer; decorrelates seeds that differ in a few bits.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::below(std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return v % n;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose,
                          int client) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the purpose tag
  for (unsigned char c : purpose) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h ^= static_cast<std::uint64_t>(static_cast<std::int64_t>(client));
  return mix(master ^ mix(h));
}

}  // namespace fedsup
