#include "primerace/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

using u64 = std::uint64_t;

// Bit position of each residue mod 30 inside a wheel byte (0xff: not coprime to 30).
constexpr std::array<std::uint8_t, 30> kBitOf = [] {
  std::array<std::uint8_t, 30> t{};
  t.fill(0xff);
  constexpr std::array<std::uint8_t, 8> wheel{1, 7, 11, 13, 17, 19, 23, 29};
  for (std::uint8_t i = 0; i < 8; ++i) t[wheel[i]] = i;
  return t;
}();

u64 isqrt(u64 n) {
  auto r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint64_t reduce_residue(std::int64_t v, u64 q) {
  std::int64_t r = v % static_cast<std::int64_t>(q);
  return static_cast<u64>(r < 0 ? r + static_cast<std::int64_t>(q) : r);
}

}  // namespace

// ---------------------------------------------------------------------------
// PrimeSegment

PrimeSegment::PrimeSegment(std::uint64_t lo, std::uint64_t hi)
    : lo_(lo), hi_(hi), bits_((hi - lo + 63) / 64, 0) {}

bool PrimeSegment::is_prime(std::uint64_t n) const {
  if (n < lo_ || n >= hi_) throw DomainError("PrimeSegment::is_prime: n outside segment");
  return (bits_[(n - lo_) >> 6] >> ((n - lo_) & 63)) & 1;
}

std::size_t PrimeSegment::count() const {
  std::size_t c = 0;
  for (u64 w : bits_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::uint64_t> PrimeSegment::primes() const {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    u64 w = bits_[i];
    while (w != 0) {
      out.push_back(lo_ + 64 * i + static_cast<u64>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SegmentedSieve

SegmentedSieve::SegmentedSieve(SieveOptions options) : options_(options) {
  if (options_.segment_bytes == 0) throw DomainError("segment size must be positive");
}

void SegmentedSieve::check_range(std::uint64_t lo, std::uint64_t hi) const {
  (void)lo;
  if (hi > kMaxHi) throw DomainError("sieve upper bound exceeds 2^63");
}

void SegmentedSieve::ensure_base_primes(std::uint64_t hi) {
  const u64 limit = hi < 2 ? 0 : isqrt(hi - 1);
  if (limit <= base_limit_) return;
  // Plain sieve over [0, limit]; base primes stay small (sqrt of the range).
  std::vector<bool> composite(limit + 1, false);
  base_primes_.clear();
  for (u64 i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    if (i >= 7) base_primes_.push_back(static_cast<std::uint32_t>(i));
    for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
  }
  base_limit_ = limit;
}

void SegmentedSieve::sieve_wheel(std::uint64_t base, std::size_t bytes) {
  wheel_.assign(bytes, 0xff);
  if (base == 0) wheel_[0] &= 0xfe;  // 1 is not prime
  const u64 end = base + 30 * static_cast<u64>(bytes);
  for (const std::uint32_t p32 : base_primes_) {
    const u64 p = p32;
    if (p * p >= end) break;
    const u64 m_first = std::max<u64>(p, (base + p - 1) / p);
    for (const std::uint8_t r : kWheel) {
      const u64 m = m_first + (r + 30 - m_first % 30) % 30;
      const u64 n = p * m;
      if (n >= end) continue;
      const auto mask = static_cast<std::uint8_t>(~(1u << kBitOf[n % 30]));
      for (u64 i = (n - base) / 30; i < bytes; i += p) wheel_[i] &= mask;
    }
  }
}

PrimeSegment SegmentedSieve::sieve_segment(std::uint64_t lo, std::uint64_t hi) {
  if (lo < 2 || lo >= hi) {
    throw DomainError("sieve_segment needs 2 <= lo < hi, got [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + ")");
  }
  check_range(lo, hi);
  if (hi - lo > 30 * static_cast<u64>(options_.segment_bytes)) {
    throw DomainError("segment [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      ") is longer than the configured segment budget");
  }
  PrimeSegment seg(lo, hi);
  for_each_prime(lo, hi, [&seg](u64 p) { seg.set(p); });
  return seg;
}

std::uint64_t SegmentedSieve::count_primes(std::uint64_t lo, std::uint64_t hi) {
  u64 c = 0;
  for_each_prime(lo, hi, [&c](u64) { ++c; });
  return c;
}

// ---------------------------------------------------------------------------
// RaceSeries

std::int64_t RaceSeries::diff_at(std::uint64_t x) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x,
                             [](u64 v, const Breakpoint& bp) { return v < bp.x; });
  return it == breakpoints.begin() ? 0 : std::prev(it)->diff;
}

RaceSeries RaceSeries::negated() const {
  RaceSeries out{q, b, a, X, {}};
  out.breakpoints.reserve(breakpoints.size());
  for (const auto& bp : breakpoints) out.breakpoints.push_back({bp.x, -bp.diff});
  return out;
}

void RaceSeries::write_csv(std::ostream& out) const {
  out << "x,diff\n";
  for (const auto& bp : breakpoints) out << bp.x << ',' << bp.diff << '\n';
}

RaceSeries race_series(std::uint64_t q, std::int64_t a, std::int64_t b, std::uint64_t X,
                       const SieveOptions& options) {
  if (q < 3) throw DomainError("race modulus must be >= 3");
  const u64 ra = reduce_residue(a, q), rb = reduce_residue(b, q);
  if (std::gcd(ra, q) != 1 || std::gcd(rb, q) != 1) {
    throw DomainError("residues " + std::to_string(a) + ", " + std::to_string(b) +
                      " must both be coprime to q = " + std::to_string(q));
  }
  if (ra == rb) throw DomainError("race needs distinct residues mod q");
  if (X < 2) throw DomainError("race_series needs X >= 2");
  if (X >= SegmentedSieve::kMaxHi) throw DomainError("X exceeds 2^63");

  const u64 hi = X + 1;
  const unsigned workers = std::max(1u, options.workers);
  const u64 span = 30 * static_cast<u64>(options.segment_bytes);
  const u64 n_chunks = (hi + span - 1) / span;

  // Each chunk records its own +-1 steps; chunks are merged in ascending order.
  struct Step {
    u64 x;
    std::int8_t delta;
  };
  std::vector<std::vector<Step>> chunk_steps(n_chunks);
  auto run_chunk = [&](SegmentedSieve& sieve, u64 c) {
    const u64 lo = std::max<u64>(2, c * span);
    const u64 chunk_hi = std::min(hi, (c + 1) * span);
    auto& steps = chunk_steps[c];
    sieve.for_each_prime(lo, chunk_hi, [&](u64 p) {
      const u64 r = p % q;
      if (r == ra) steps.push_back({p, 1});
      else if (r == rb) steps.push_back({p, -1});
    });
  };

  if (workers == 1 || n_chunks == 1) {
    SegmentedSieve sieve(options);
    for (u64 c = 0; c < n_chunks; ++c) run_chunk(sieve, c);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        SegmentedSieve sieve(options);
        for (u64 c = w; c < n_chunks; c += workers) run_chunk(sieve, c);
      });
    }
  }

  RaceSeries rs{q, ra, rb, X, {}};
  std::size_t total = 0;
  for (const auto& s : chunk_steps) total += s.size();
  rs.breakpoints.reserve(total);
  std::int64_t diff = 0;
  for (auto& s : chunk_steps) {
    for (const Step& st : s) {
      diff += st.delta;
      rs.breakpoints.push_back({st.x, diff});
    }
    std::vector<Step>().swap(s);
  }
  return rs;
}

std::vector<ResidueCounts> residue_counts(std::uint64_t q, std::uint64_t X,
                                          const std::vector<std::uint64_t>& sample_points,
                                          const SieveOptions& options) {
  if (q == 0) throw DomainError("modulus must be positive");
  if (!std::is_sorted(sample_points.begin(), sample_points.end())) {
    throw DomainError("residue_counts: sample points must be sorted ascending");
  }
  for (u64 s : sample_points) {
    if (s < 2 || s > X) throw DomainError("residue_counts: sample " + std::to_string(s) + " outside [2, X]");
  }
  std::vector<ResidueCounts> out;
  out.reserve(sample_points.size());
  if (sample_points.empty()) return out;

  std::vector<u64> counts(q, 0);
  u64 total = 0, ramified = 0;
  std::size_t next = 0;
  auto snapshot_until = [&](u64 bound) {
    // Emit every sample strictly below `bound` (all primes < bound are counted).
    while (next < sample_points.size() && sample_points[next] < bound) {
      out.push_back({sample_points[next], counts, total, ramified});
      ++next;
    }
  };
  SegmentedSieve sieve(options);
  sieve.for_each_prime(2, sample_points.back() + 1, [&](u64 p) {
    snapshot_until(p);
    ++total;
    const u64 r = p % q;
    if (std::gcd(r, q) == 1) ++counts[r];
    else ++ramified;
  });
  snapshot_until(sample_points.back() + 1);
  return out;
}

}  // namespace primerace
