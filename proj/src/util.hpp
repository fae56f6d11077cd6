// util.hpp - deterministic RNG, dynamic bitset, exact rationals, error plumbing.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace npce {

// Error taxonomy mirrored by the C API status codes and the CLI exit codes.
enum class Err { Check = 1, Usage = 2, Budget = 3, Internal = 4 };

class Error : public std::runtime_error {
public:
  Error(Err kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Err kind() const { return kind_; }

private:
  Err kind_;
};

[[noreturn]] inline void fail_check(const std::string& msg) { throw Error(Err::Check, msg); }
[[noreturn]] inline void fail_usage(const std::string& msg) { throw Error(Err::Usage, msg); }
[[noreturn]] inline void fail_budget(const std::string& msg) { throw Error(Err::Budget, msg); }

uint64_t splitmix64(uint64_t x);

// Seeded generator. All randomness flows through this wrapper so that replay
// is byte-identical across platforms: mt19937_64 output is fully specified,
// and the uniform mappings below avoid std::*_distribution (whose streams are
// implementation-defined).
class Rng {
public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, n) by rejection.
  uint64_t next_below(uint64_t n) {
    if (n == 0) fail_usage("next_below: n must be positive");
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

  // Always consumes exactly one draw, so replay does not depend on p.
  bool bernoulli(double p) { return next_unit() < p; }

private:
  std::mt19937_64 gen_;
};

// Derives independent substreams from one master seed; chunk i of a parallel
// computation uses stream(i), and merging in chunk order keeps results
// independent of the worker count.
class SeedSequence {
public:
  explicit SeedSequence(uint64_t master) : master_(master) {}
  uint64_t master() const { return master_; }
  Rng stream(uint64_t index) const {
    return Rng(splitmix64(master_ + 0x9e3779b97f4a7c15ULL * (index + 1)));
  }

private:
  uint64_t master_;
};

// Fixed-size-at-construction bitset; vertex sets and cut sides.
class Bits {
public:
  Bits() = default;
  explicit Bits(uint32_t n) : n_(n), w_((n + 63) / 64, 0) {}

  uint32_t size() const { return n_; }

  bool test(uint32_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

  void set(uint32_t i, bool value = true) {
    if (value)
      w_[i >> 6] |= uint64_t(1) << (i & 63);
    else
      w_[i >> 6] &= ~(uint64_t(1) << (i & 63));
  }

  uint32_t count() const;
  bool none() const;
  bool all() const;
  bool is_subset_of(const Bits& other) const;

  Bits operator|(const Bits& o) const;
  Bits operator&(const Bits& o) const;
  Bits flipped() const;

  bool operator==(const Bits& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator<(const Bits& o) const;  // lexicographic; stable map ordering

  std::vector<uint32_t> members() const;
  static Bits of(uint32_t n, const std::vector<uint32_t>& ids);

private:
  uint32_t n_ = 0;
  std::vector<uint64_t> w_;
};

// Exact rational on int64 with __int128 intermediates; throws on overflow.
// Denominators stay small here (products of per-step sampling denominators),
// so int64 storage is deliberate: an overflow means a modelling bug, not a
// precision problem to hide.
struct Rat {
  long long num = 0;
  long long den = 1;

  Rat() = default;
  Rat(long long n) : num(n), den(1) {}
  Rat(long long n, long long d);

  Rat operator+(const Rat& o) const;
  Rat operator-(const Rat& o) const;
  Rat operator*(const Rat& o) const;
  Rat operator/(const Rat& o) const;
  bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rat& o) const { return !(*this == o); }
  bool operator<(const Rat& o) const;

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
};

uint64_t fnv1a64(const std::string& s);

// Runs fn(chunk) for chunk = 0..chunks-1 on up to `threads` workers
// (0 = hardware concurrency). Chunks are independent; callers merge
// per-chunk results in index order.
void parallel_chunks(uint32_t chunks, uint32_t threads, const std::function<void(uint32_t)>& fn);

}  // namespace npce
