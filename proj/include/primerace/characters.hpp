#pragma once

// Dirichlet characters mod q with exact root-of-unity values.
//
// (Z/qZ)* is decomposed into cyclic factors: a primitive root for each odd
// prime power, -1 and 5 for 2^k (k >= 3), -1 for 4, combined by CRT.  A
// character is an exponent vector c over those generators and evaluates to
// the angle sum_i c_i * log_i(n) / ord_i (mod 1).

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace primerace {

/// A point e^{2 pi i num/den} on the unit circle, kept reduced with num < den.
class RationalAngle {
 public:
  RationalAngle() = default;
  RationalAngle(std::int64_t num, std::uint64_t den);

  std::uint64_t num() const noexcept { return num_; }
  std::uint64_t den() const noexcept { return den_; }
  bool is_zero() const noexcept { return num_ == 0; }

  RationalAngle operator+(const RationalAngle& o) const;
  RationalAngle operator-() const;  // complex conjugate
  RationalAngle operator-(const RationalAngle& o) const { return *this + (-o); }

  /// Angle in radians, in [0, 2 pi).
  double radians() const;
  std::complex<double> to_complex() const;

  friend bool operator==(const RationalAngle&, const RationalAngle&) = default;
  friend std::strong_ordering operator<=>(const RationalAngle& a, const RationalAngle& b);

 private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

/// Character value: a root of unity, or empty for (n, q) > 1.
using CharValue = std::optional<RationalAngle>;

struct GroupGenerator {
  std::uint64_t generator;  // residue mod q
  std::uint64_t order;
};

namespace detail {
struct UnitGroup;
}

class Character {
 public:
  CharValue operator()(std::int64_t n) const;

  std::size_t index() const noexcept { return index_; }
  bool is_principal() const noexcept;
  std::uint64_t modulus() const noexcept;
  std::span<const std::uint64_t> exponents() const noexcept { return exponents_; }

  /// Dense value table over residues 0..q-1.  O(q); meant for tests and dumps.
  std::vector<CharValue> values() const;

 private:
  friend class CharacterTable;
  Character(std::shared_ptr<const detail::UnitGroup> group, std::size_t index,
            std::vector<std::uint64_t> exponents);

  std::shared_ptr<const detail::UnitGroup> group_;
  std::size_t index_ = 0;
  std::vector<std::uint64_t> exponents_;
};

/// All phi(q) characters mod q, enumerated lexicographically on exponent
/// vectors (index 0 is the principal character).  Immutable and safe to share
/// across threads.
class CharacterTable {
 public:
  static constexpr std::uint64_t kMaxModulus = 10'000'000;

  explicit CharacterTable(std::uint64_t q);

  std::uint64_t modulus() const noexcept;
  std::uint64_t phi() const noexcept;
  std::size_t size() const noexcept { return static_cast<std::size_t>(phi()); }
  std::span<const GroupGenerator> decomposition() const noexcept;

  Character character(std::size_t index) const;
  std::vector<Character> characters() const;

 private:
  std::shared_ptr<const detail::UnitGroup> group_;
};

inline CharacterTable build_character_table(std::uint64_t q) { return CharacterTable(q); }

inline CharValue char_value(const Character& chi, std::int64_t n) { return chi(n); }

/// Exact sum over all characters of conj(chi(a)) * chi(n).  Returns phi(q) or
/// 0; throws ConsistencyError if the value multiset is not a full subgroup of
/// roots of unity (which would mean the table is broken).
std::int64_t orthogonality_sum(const CharacterTable& table, std::int64_t a, std::int64_t n);

struct RacePhase {
  std::uint64_t q = 0;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::size_t chi_index = 0;
  double xi = 0.0;         // arg(chi(a) - chi(b)) in [0, 2 pi)
  double magnitude = 0.0;  // |chi(a) - chi(b)|
  RationalAngle chi_a;
  RationalAngle chi_b;
};

/// Nonprincipal chi with chi(a) != chi(b): the smallest index unless
/// `chi_override` names one explicitly.
RacePhase select_race_character(const CharacterTable& table, std::int64_t a, std::int64_t b,
                                std::optional<std::size_t> chi_override = std::nullopt);

/// Euler's totient by trial-division factorisation.
std::uint64_t euler_phi(std::uint64_t n);

}  // namespace primerace
