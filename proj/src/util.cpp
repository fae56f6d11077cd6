#include "util.hpp"

#include <atomic>
#include <functional>
#include <numeric>
#include <thread>

namespace npce {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint32_t Bits::count() const {
  uint32_t c = 0;
  for (uint64_t word : w_) c += static_cast<uint32_t>(__builtin_popcountll(word));
  return c;
}

bool Bits::none() const {
  for (uint64_t word : w_)
    if (word) return false;
  return true;
}

bool Bits::all() const { return count() == n_; }

bool Bits::is_subset_of(const Bits& other) const {
  for (size_t i = 0; i < w_.size(); ++i)
    if (w_[i] & ~other.w_[i]) return false;
  return true;
}

Bits Bits::operator|(const Bits& o) const {
  Bits r(n_);
  for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] | o.w_[i];
  return r;
}

Bits Bits::operator&(const Bits& o) const {
  Bits r(n_);
  for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & o.w_[i];
  return r;
}

Bits Bits::flipped() const {
  Bits r(n_);
  for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = ~w_[i];
  // Clear the tail beyond n_ so count/equality stay meaningful.
  uint32_t tail = n_ & 63;
  if (tail && !r.w_.empty()) r.w_.back() &= (uint64_t(1) << tail) - 1;
  return r;
}

bool Bits::operator<(const Bits& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  return w_ < o.w_;
}

std::vector<uint32_t> Bits::members() const {
  std::vector<uint32_t> out;
  out.reserve(count());
  for (uint32_t i = 0; i < n_; ++i)
    if (test(i)) out.push_back(i);
  return out;
}

Bits Bits::of(uint32_t n, const std::vector<uint32_t>& ids) {
  Bits b(n);
  for (uint32_t id : ids) b.set(id);
  return b;
}

namespace {

long long checked_narrow(__int128 v, const char* what) {
  if (v > static_cast<__int128>(INT64_MAX) || v < static_cast<__int128>(INT64_MIN))
    throw Error(Err::Internal, std::string("rational overflow in ") + what);
  return static_cast<long long>(v);
}

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rat make_rat(__int128 num, __int128 den, const char* what) {
  if (den == 0) throw Error(Err::Internal, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  Rat r;
  r.num = checked_narrow(num, what);
  r.den = checked_narrow(den, what);
  return r;
}

}  // namespace

Rat::Rat(long long n, long long d) { *this = make_rat(n, d, "construction"); }

Rat Rat::operator+(const Rat& o) const {
  return make_rat(static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den,
                  static_cast<__int128>(den) * o.den, "addition");
}

Rat Rat::operator-(const Rat& o) const {
  return make_rat(static_cast<__int128>(num) * o.den - static_cast<__int128>(o.num) * den,
                  static_cast<__int128>(den) * o.den, "subtraction");
}

Rat Rat::operator*(const Rat& o) const {
  return make_rat(static_cast<__int128>(num) * o.num, static_cast<__int128>(den) * o.den,
                  "multiplication");
}

Rat Rat::operator/(const Rat& o) const {
  if (o.num == 0) throw Error(Err::Internal, "rational division by zero");
  return make_rat(static_cast<__int128>(num) * o.den, static_cast<__int128>(den) * o.num,
                  "division");
}

bool Rat::operator<(const Rat& o) const {
  return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
}

std::string Rat::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void parallel_chunks(uint32_t chunks, uint32_t threads, const std::function<void(uint32_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, chunks);
  if (threads <= 1) {
    for (uint32_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::atomic<uint32_t> next{0};
  for (uint32_t t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        uint32_t c = next.fetch_add(1);
        if (c >= chunks) return;
        fn(c);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace npce
