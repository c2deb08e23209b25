#include "primerace/characters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <tuple>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

using u64 = std::uint64_t;
__extension__ using u128 = unsigned __int128;
__extension__ using i128 = __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

std::vector<std::pair<u64, unsigned>> factorize(u64 n) {
  std::vector<std::pair<u64, unsigned>> out;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

u64 primitive_root_mod_prime(u64 p) {
  if (p == 2) return 1;
  const auto factors = factorize(p - 1);
  for (u64 g = 2; g < p; ++g) {
    bool ok = true;
    for (const auto& [f, e] : factors) {
      (void)e;
      if (powmod(g, (p - 1) / f, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw ConsistencyError("no primitive root mod " + std::to_string(p));
}

// Inverse of a mod m for coprime a, m.
u64 inverse_mod(u64 a, u64 m) {
  i128 t = 0, new_t = 1;
  i128 r = static_cast<i128>(m), new_r = static_cast<i128>(a % m);
  while (new_r != 0) {
    i128 quotient = r / new_r;
    std::tie(t, new_t) = std::make_tuple(new_t, t - quotient * new_t);
    std::tie(r, new_r) = std::make_tuple(new_r, r - quotient * new_r);
  }
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

constexpr std::uint32_t kNotUnit = 0xffffffffu;

}  // namespace

// ---------------------------------------------------------------------------
// RationalAngle

RationalAngle::RationalAngle(std::int64_t num, std::uint64_t den) {
  if (den == 0) throw DomainError("RationalAngle: zero denominator");
  const auto d = static_cast<std::int64_t>(den);
  std::int64_t r = num % d;
  if (r < 0) r += d;
  const u64 g = std::gcd(static_cast<u64>(r), den);
  num_ = static_cast<u64>(r) / g;
  den_ = den / g;
}

RationalAngle RationalAngle::operator+(const RationalAngle& o) const {
  const u64 l = std::lcm(den_, o.den_);
  const u64 n = (num_ * (l / den_) + o.num_ * (l / o.den_)) % l;
  return RationalAngle(static_cast<std::int64_t>(n), l);
}

RationalAngle RationalAngle::operator-() const {
  return RationalAngle(static_cast<std::int64_t>((den_ - num_) % den_), den_);
}

double RationalAngle::radians() const {
  return 2.0 * std::numbers::pi * static_cast<double>(num_) / static_cast<double>(den_);
}

std::complex<double> RationalAngle::to_complex() const {
  // Exact values at the quarter turns keep real characters exactly real.
  if (num_ == 0) return {1.0, 0.0};
  if (den_ == 2) return {-1.0, 0.0};
  if (den_ == 4) return num_ == 1 ? std::complex<double>{0.0, 1.0} : std::complex<double>{0.0, -1.0};
  return std::polar(1.0, radians());
}

std::strong_ordering operator<=>(const RationalAngle& a, const RationalAngle& b) {
  const u128 lhs = static_cast<u128>(a.num_) * b.den_;
  const u128 rhs = static_cast<u128>(b.num_) * a.den_;
  return lhs <=> rhs;
}

// ---------------------------------------------------------------------------
// Unit group

namespace detail {

struct CyclicFactor {
  u64 modulus;  // prime power carrying this factor
  u64 order;
  u64 lifted_generator;
  enum class Kind { odd_prime_power, minus_one, five } kind;
  std::vector<std::uint32_t> dlog;  // indexed by n mod modulus (unused for minus_one)

  u64 exponent(u64 n) const {
    const u64 r = n % modulus;
    switch (kind) {
      case Kind::minus_one:
        return (r % 4 == 3) ? 1 : 0;
      case Kind::five:
        // n = +-5^e; the table is filled for both signs.
        return dlog[r];
      case Kind::odd_prime_power:
        return dlog[r];
    }
    return 0;
  }
};

struct UnitGroup {
  u64 q = 0;
  u64 phi = 0;
  u64 common_den = 1;  // lcm of the factor orders
  std::vector<CyclicFactor> factors;
  std::vector<GroupGenerator> generators;

  bool is_unit(u64 r) const { return std::gcd(r, q) == 1; }

  std::vector<u64> decode(std::size_t index) const {
    std::vector<u64> exps(factors.size());
    u64 rest = index;
    for (std::size_t i = factors.size(); i-- > 0;) {
      exps[i] = rest % factors[i].order;
      rest /= factors[i].order;
    }
    return exps;
  }
};

}  // namespace detail

namespace {

u64 crt_lift(u64 residue, u64 modulus, u64 q) {
  // x = residue (mod modulus), x = 1 (mod q / modulus).
  const u64 other = q / modulus;
  if (other == 1) return residue % q;
  // x = 1 + other * t, other * t = residue - 1 (mod modulus)
  const u64 inv = inverse_mod(other % modulus, modulus);
  const u64 t = mulmod((residue + modulus - 1) % modulus, inv, modulus);
  return (1 + mulmod(other, t, q)) % q;
}

std::shared_ptr<const detail::UnitGroup> build_group(u64 q) {
  using detail::CyclicFactor;
  auto g = std::make_shared<detail::UnitGroup>();
  g->q = q;
  g->phi = euler_phi(q);

  for (const auto& [p, e] : factorize(q)) {
    u64 pe = 1;
    for (unsigned i = 0; i < e; ++i) pe *= p;
    if (p == 2) {
      if (e >= 2) {
        CyclicFactor f{pe, 2, crt_lift(pe - 1, pe, q), CyclicFactor::Kind::minus_one, {}};
        g->factors.push_back(std::move(f));
      }
      if (e >= 3) {
        CyclicFactor f{pe, pe / 4, crt_lift(5, pe, q), CyclicFactor::Kind::five, {}};
        f.dlog.assign(pe, kNotUnit);
        u64 x = 1;
        for (u64 i = 0; i < f.order; ++i) {
          f.dlog[x] = static_cast<std::uint32_t>(i);
          f.dlog[pe - x] = static_cast<std::uint32_t>(i);
          x = x * 5 % pe;
        }
        g->factors.push_back(std::move(f));
      }
      continue;
    }
    u64 root = primitive_root_mod_prime(p);
    if (e >= 2 && powmod(root, p - 1, p * p) == 1) root += p;
    const u64 order = pe / p * (p - 1);
    CyclicFactor f{pe, order, crt_lift(root, pe, q), CyclicFactor::Kind::odd_prime_power, {}};
    f.dlog.assign(pe, kNotUnit);
    u64 x = 1;
    for (u64 i = 0; i < order; ++i) {
      f.dlog[x] = static_cast<std::uint32_t>(i);
      x = mulmod(x, root, pe);
    }
    g->factors.push_back(std::move(f));
  }

  u64 product = 1;
  for (const auto& f : g->factors) {
    g->common_den = std::lcm(g->common_den, f.order);
    g->generators.push_back({f.lifted_generator, f.order});
    product *= f.order;
  }
  if (product != g->phi) throw ConsistencyError("unit group orders do not multiply to phi(q)");
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// Character

Character::Character(std::shared_ptr<const detail::UnitGroup> group, std::size_t index,
                     std::vector<std::uint64_t> exponents)
    : group_(std::move(group)), index_(index), exponents_(std::move(exponents)) {}

bool Character::is_principal() const noexcept {
  return std::all_of(exponents_.begin(), exponents_.end(), [](u64 c) { return c == 0; });
}

std::uint64_t Character::modulus() const noexcept { return group_->q; }

CharValue Character::operator()(std::int64_t n) const {
  const auto q = static_cast<std::int64_t>(group_->q);
  std::int64_t r = n % q;
  if (r < 0) r += q;
  const auto ur = static_cast<u64>(r);
  if (!group_->is_unit(ur)) return std::nullopt;
  const u64 den = group_->common_den;
  u64 num = 0;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    const auto& f = group_->factors[i];
    if (exponents_[i] == 0) continue;
    const u64 weight = den / f.order;
    num = (num + (exponents_[i] * f.exponent(ur) % f.order) * weight) % den;
  }
  return RationalAngle(static_cast<std::int64_t>(num), den);
}

std::vector<CharValue> Character::values() const {
  std::vector<CharValue> out;
  out.reserve(group_->q);
  for (u64 n = 0; n < group_->q; ++n) out.push_back((*this)(static_cast<std::int64_t>(n)));
  return out;
}

// ---------------------------------------------------------------------------
// CharacterTable

CharacterTable::CharacterTable(std::uint64_t q) {
  if (q < 3) throw DomainError("character table needs q >= 3, got " + std::to_string(q));
  if (q > kMaxModulus) throw DomainError("modulus " + std::to_string(q) + " exceeds 10^7");
  group_ = build_group(q);
}

std::uint64_t CharacterTable::modulus() const noexcept { return group_->q; }
std::uint64_t CharacterTable::phi() const noexcept { return group_->phi; }

std::span<const GroupGenerator> CharacterTable::decomposition() const noexcept {
  return group_->generators;
}

Character CharacterTable::character(std::size_t index) const {
  if (index >= size()) {
    throw DomainError("character index " + std::to_string(index) + " out of range (phi = " +
                      std::to_string(phi()) + ")");
  }
  return Character(group_, index, group_->decode(index));
}

std::vector<Character> CharacterTable::characters() const {
  std::vector<Character> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(character(i));
  return out;
}

std::int64_t orthogonality_sum(const CharacterTable& table, std::int64_t a, std::int64_t n) {
  const u64 q = table.modulus();
  auto reduce = [q](std::int64_t v) {
    std::int64_t r = v % static_cast<std::int64_t>(q);
    return static_cast<u64>(r < 0 ? r + static_cast<std::int64_t>(q) : r);
  };
  if (std::gcd(reduce(a), q) != 1 || std::gcd(reduce(n), q) != 1) return 0;

  // Histogram of conj(chi(a)) chi(n) over a common denominator.
  u64 den = 1;
  for (const auto& g : table.decomposition()) den = std::lcm(den, g.order);
  std::vector<u64> counts(den, 0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Character chi = table.character(i);
    const RationalAngle v = -*chi(a) + *chi(n);
    counts[v.num() * (den / v.den())] += 1;
  }
  const auto phi = static_cast<std::int64_t>(table.phi());
  if (counts[0] == table.phi()) return phi;

  u64 step = den;
  for (u64 k = 0; k < den; ++k) {
    if (counts[k] != 0) step = std::gcd(step, k);
  }
  const u64 d = den / step;
  for (u64 k = 0; k < den; ++k) {
    const u64 expected = (k % step == 0) ? table.phi() / d : 0;
    if (counts[k] != expected) {
      throw ConsistencyError("character values are not a full set of roots of unity");
    }
  }
  return 0;
}

RacePhase select_race_character(const CharacterTable& table, std::int64_t a, std::int64_t b,
                                std::optional<std::size_t> chi_override) {
  const u64 q = table.modulus();
  auto reduce = [q](std::int64_t v) {
    std::int64_t r = v % static_cast<std::int64_t>(q);
    return static_cast<u64>(r < 0 ? r + static_cast<std::int64_t>(q) : r);
  };
  const u64 ra = reduce(a), rb = reduce(b);
  if (std::gcd(ra, q) != 1 || std::gcd(rb, q) != 1) {
    throw DomainError("residues " + std::to_string(a) + ", " + std::to_string(b) +
                      " must both be coprime to q = " + std::to_string(q));
  }
  if (ra == rb) {
    throw DomainError("race needs distinct residues; " + std::to_string(a) + " = " +
                      std::to_string(b) + " (mod " + std::to_string(q) + ")");
  }

  auto fill = [&](const Character& chi) {
    RacePhase race;
    race.q = q;
    race.a = ra;
    race.b = rb;
    race.chi_index = chi.index();
    race.chi_a = *chi(static_cast<std::int64_t>(ra));
    race.chi_b = *chi(static_cast<std::int64_t>(rb));
    // e^{ia} - e^{ib} = 2i sin((a-b)/2) e^{i(a+b)/2}; done in exact turns.
    const u64 den = 4 * std::lcm(race.chi_a.den(), race.chi_b.den());
    const u64 na = race.chi_a.num() * (den / race.chi_a.den());
    const u64 nb = race.chi_b.num() * (den / race.chi_b.den());
    u64 xi_num = (na + nb) / 2 + den / 4;
    if (na < nb) xi_num += den / 2;
    const RationalAngle xi_turns(static_cast<std::int64_t>(xi_num), den);
    race.xi = xi_turns.radians();
    const double diff = static_cast<double>(static_cast<std::int64_t>(na) - static_cast<std::int64_t>(nb)) /
                        static_cast<double>(den);
    race.magnitude = 2.0 * std::abs(std::sin(std::numbers::pi * diff));
    return race;
  };

  if (chi_override) {
    const Character chi = table.character(*chi_override);
    if (chi.is_principal() || *chi(a) == *chi(b)) {
      throw DomainError("character " + std::to_string(*chi_override) +
                        " does not separate the residues (needs nonprincipal chi with chi(a) != chi(b))");
    }
    return fill(chi);
  }
  for (std::size_t i = 1; i < table.size(); ++i) {
    const Character chi = table.character(i);
    if (*chi(a) != *chi(b)) return fill(chi);
  }
  throw ConsistencyError("no separating character found");
}

std::uint64_t euler_phi(std::uint64_t n) {
  u64 result = n;
  for (const auto& [p, e] : factorize(n)) {
    (void)e;
    result = result / p * (p - 1);
  }
  return result;
}

}  // namespace primerace
