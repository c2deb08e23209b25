#pragma once

// Segmented sieve of Eratosthenes with mod-30 wheel packing and the exact
// race step function D(x) = pi(x;q,a) - pi(x;q,b) built from it.

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <vector>

namespace primerace {

struct SieveOptions {
  /// Bytes per segment; each byte holds the 8 wheel residues of 30 integers.
  /// 2^17 bytes = 2^20 flags.
  std::size_t segment_bytes = std::size_t{1} << 17;
  /// Worker threads for race_series / residue_counts.
  unsigned workers = 1;
};

/// Primality flags for the integers of [lo, hi).
class PrimeSegment {
 public:
  PrimeSegment(std::uint64_t lo, std::uint64_t hi);

  std::uint64_t lo() const noexcept { return lo_; }
  std::uint64_t hi() const noexcept { return hi_; }
  bool is_prime(std::uint64_t n) const;
  std::size_t count() const;
  std::vector<std::uint64_t> primes() const;

 private:
  friend class SegmentedSieve;
  void set(std::uint64_t n) { bits_[(n - lo_) >> 6] |= std::uint64_t{1} << ((n - lo_) & 63); }

  std::uint64_t lo_;
  std::uint64_t hi_;
  std::vector<std::uint64_t> bits_;
};

class SegmentedSieve {
 public:
  static constexpr std::uint64_t kMaxHi = std::uint64_t{1} << 63;

  explicit SegmentedSieve(SieveOptions options = {});

  const SieveOptions& options() const noexcept { return options_; }

  /// Exact flags on [lo, hi); the range may span at most one segment.
  PrimeSegment sieve_segment(std::uint64_t lo, std::uint64_t hi);

  /// Calls f(p) for every prime p in [lo, hi), ascending.
  template <class F>
  void for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& f);

  std::uint64_t count_primes(std::uint64_t lo, std::uint64_t hi);

 private:
  static constexpr std::array<std::uint8_t, 8> kWheel{1, 7, 11, 13, 17, 19, 23, 29};

  void ensure_base_primes(std::uint64_t hi);
  // Sieves the wheel bytes covering [base, base + 30 * bytes) with base % 30 == 0.
  void sieve_wheel(std::uint64_t base, std::size_t bytes);
  void check_range(std::uint64_t lo, std::uint64_t hi) const;

  SieveOptions options_;
  std::vector<std::uint32_t> base_primes_;  // primes >= 7
  std::uint64_t base_limit_ = 0;
  std::vector<std::uint8_t> wheel_;
};

template <class F>
void SegmentedSieve::for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& f) {
  check_range(lo, hi);
  if (lo >= hi) return;
  for (std::uint64_t p : {2u, 3u, 5u}) {
    if (p >= lo && p < hi) f(p);
  }
  ensure_base_primes(hi);
  const std::uint64_t span = 30 * static_cast<std::uint64_t>(options_.segment_bytes);
  for (std::uint64_t base = lo - lo % 30; base < hi; base += span) {
    const std::uint64_t remaining = (hi - base + 29) / 30;
    const auto bytes = static_cast<std::size_t>(std::min<std::uint64_t>(options_.segment_bytes, remaining));
    sieve_wheel(base, bytes);
    for (std::size_t i = 0; i < bytes; ++i) {
      unsigned byte = wheel_[i];
      while (byte != 0) {
        const int bit = std::countr_zero(byte);
        byte &= byte - 1;
        const std::uint64_t n = base + 30 * static_cast<std::uint64_t>(i) + kWheel[static_cast<std::size_t>(bit)];
        if (n >= lo && n < hi && n > 5) f(n);
      }
    }
  }
}

/// Exact step function D(x) = pi(x;q,a) - pi(x;q,b) on [2, X], stored as the
/// primes where it changes.  D(2^-) = 0 and D is right-continuous.
struct RaceSeries {
  struct Breakpoint {
    std::uint64_t x;
    std::int64_t diff;  // D(x) from x onwards
    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
  };

  std::uint64_t q = 0;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t X = 0;
  std::vector<Breakpoint> breakpoints;

  std::int64_t diff_at(std::uint64_t x) const;
  std::int64_t final_diff() const { return breakpoints.empty() ? 0 : breakpoints.back().diff; }
  /// The series for the swapped race (b, a).
  RaceSeries negated() const;
  /// CSV with header "x,diff", one row per breakpoint, LF endings.
  void write_csv(std::ostream& out) const;
};

RaceSeries race_series(std::uint64_t q, std::int64_t a, std::int64_t b, std::uint64_t X,
                       const SieveOptions& options = {});

struct ResidueCounts {
  std::uint64_t x = 0;
  std::vector<std::uint64_t> counts;  // counts[r] = pi(x;q,r); zero for (r,q) > 1
  std::uint64_t pi_total = 0;
  std::uint64_t ramified = 0;  // primes <= x dividing q

  std::uint64_t count(std::uint64_t residue) const { return counts.at(residue); }
};

/// Counts per residue class at each sample point, from a single pass.
std::vector<ResidueCounts> residue_counts(std::uint64_t q, std::uint64_t X,
                                          const std::vector<std::uint64_t>& sample_points,
                                          const SieveOptions& options = {});

}  // namespace primerace
