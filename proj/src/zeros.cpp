#include "primerace/zeros.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

constexpr int kMaxLevel = 64;

double ipow(int j, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= j;
  return r;
}

bool zero_less(const Zero& a, const Zero& b) {
  if (a.log_gamma != b.log_gamma) return a.log_gamma < b.log_gamma;
  return a.beta < b.beta;
}

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

double Zero::gamma() const { return std::exp(log_gamma); }

// ---------------------------------------------------------------------------
// ZeroMultiset

void ZeroMultiset::normalize(std::vector<Zero>& list) {
  std::stable_sort(list.begin(), list.end(), zero_less);
  std::vector<Zero> merged;
  merged.reserve(list.size());
  for (const Zero& z : list) {
    if (!merged.empty() && merged.back().log_gamma == z.log_gamma && merged.back().beta == z.beta) {
      merged.back().multiplicity += z.multiplicity;
    } else {
      merged.push_back(z);
    }
  }
  list.swap(merged);
}

void ZeroMultiset::add(std::size_t character, const Zero& z) {
  auto& list = lists_[character];
  auto it = std::lower_bound(list.begin(), list.end(), z, zero_less);
  if (it != list.end() && it->log_gamma == z.log_gamma && it->beta == z.beta) {
    it->multiplicity += z.multiplicity;
  } else {
    list.insert(it, z);
  }
}

void ZeroMultiset::add_all(std::size_t character, std::span<const Zero> zs) {
  auto& list = lists_[character];
  list.insert(list.end(), zs.begin(), zs.end());
  normalize(list);
}

std::span<const Zero> ZeroMultiset::zeros(std::size_t character) const {
  auto it = lists_.find(character);
  if (it == lists_.end()) return {};
  return it->second;
}

std::size_t ZeroMultiset::distinct_count() const {
  std::size_t n = 0;
  for (const auto& [chi, list] : lists_) n += list.size();
  return n;
}

std::uint64_t ZeroMultiset::total_multiplicity() const {
  std::uint64_t n = 0;
  for (const auto& [chi, list] : lists_) {
    for (const Zero& z : list) n += z.multiplicity;
  }
  return n;
}

bool operator==(const ZeroMultiset& a, const ZeroMultiset& b) {
  auto non_empty = [](const ZeroMultiset& m) {
    std::map<std::size_t, const std::vector<Zero>*> out;
    for (const auto& [chi, list] : m.lists_) {
      if (!list.empty()) out[chi] = &list;
    }
    return out;
  };
  const auto la = non_empty(a), lb = non_empty(b);
  if (la.size() != lb.size()) return false;
  for (auto ia = la.begin(), ib = lb.begin(); ia != la.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second->size() != ib->second->size()) return false;
    for (std::size_t i = 0; i < ia->second->size(); ++i) {
      const Zero& x = (*ia->second)[i];
      const Zero& y = (*ib->second)[i];
      if (x.beta != y.beta || x.log_gamma != y.log_gamma || x.multiplicity != y.multiplicity) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Construction

double GammaSpec::log_gamma() const { return log_base + std::log(factor); }

double ScaleMode::growth(int j) const { return growth_c * std::pow(static_cast<double>(j), growth_p); }

std::uint64_t LevelParams::size() const {
  const auto jj = static_cast<std::uint64_t>(j);
  return jj * jj * jj;
}

LevelParams HypotheticalConstruction::level(int j) const {
  LevelParams lv;
  lv.j = j;
  if (scale_mode) {
    const double g = scale_mode->growth(j);
    lv.gamma = scale_mode->gamma_override ? GammaSpec{0.0, *scale_mode->gamma_override} : GammaSpec{g, 1.5};
    lv.delta_j = scale_mode->delta_override ? *scale_mode->delta_override : 1.0 / g;
    lv.theta_j = (xi - std::numbers::pi / 2) / (g * g);
  } else {
    const double j8 = ipow(j, 8);
    lv.gamma = GammaSpec{j8, 1.5};
    lv.delta_j = 1.0 / j8;
    lv.theta_j = (xi - std::numbers::pi / 2) / (j8 * j8);
  }
  if (gamma_selector) lv.gamma = gamma_selector(j);
  if (delta_selector) lv.delta_j = delta_selector(j);
  if (theta_selector) lv.theta_j = theta_selector(j, xi);
  return lv;
}

std::string HypotheticalConstruction::describe() const {
  std::ostringstream os;
  os << "B(xi=" << fmt_double(xi) << ", sigma=" << fmt_double(sigma) << ", delta=" << fmt_double(delta)
     << ", A=" << fmt_double(A) << ", j=[" << j_min << "," << j_max << "])";
  if (scale_mode) {
    os << " scale-mode: g(j)=" << fmt_double(scale_mode->growth_c) << "*j^"
       << fmt_double(scale_mode->growth_p);
    if (scale_mode->gamma_override) os << ", gamma_j=" << fmt_double(*scale_mode->gamma_override);
    if (scale_mode->delta_override) os << ", delta_j=" << fmt_double(*scale_mode->delta_override);
  }
  return os.str();
}

HypotheticalConstruction::DeltaSelector clamped_delta_selector(double delta) {
  return [delta](int j) { return std::min(1.0 / ipow(j, 8), delta); };
}

std::vector<std::string> validate(const HypotheticalConstruction& c) {
  std::vector<std::string> bad;
  if (!(c.sigma > 0.5 && c.sigma < 1.0)) bad.push_back("sigma must lie in (1/2, 1), got " + fmt_double(c.sigma));
  if (!(c.delta > 0.0 && c.delta < c.sigma - 0.5)) {
    bad.push_back("delta must lie in (0, sigma - 1/2), got " + fmt_double(c.delta));
  }
  if (!(c.A > 0.0)) bad.push_back("A must be positive, got " + fmt_double(c.A));
  if (!(c.xi >= 0.0 && c.xi < 2 * std::numbers::pi)) bad.push_back("xi must lie in [0, 2pi), got " + fmt_double(c.xi));
  if (c.j_min < 1 || c.j_max < c.j_min) {
    bad.push_back("level range must satisfy 1 <= j_min <= j_max, got [" + std::to_string(c.j_min) + ", " +
                  std::to_string(c.j_max) + "]");
    return bad;
  }
  if (c.j_max > kMaxLevel) bad.push_back("j_max above " + std::to_string(kMaxLevel) + " is not supported");

  for (int j = c.j_min; j <= std::min(c.j_max, kMaxLevel); ++j) {
    const LevelParams lv = c.level(j);
    const std::string at = " at j=" + std::to_string(j);
    const double lg = lv.gamma.log_gamma();
    if (!std::isfinite(lg)) bad.push_back("gamma_j must be positive and finite" + at);
    if (!c.scaled()) {
      const double j8 = ipow(j, 8);
      const double slack = 1e-12 * std::max(1.0, j8);
      if (lg < j8 - slack || lg > j8 + std::numbers::ln2 + slack) {
        bad.push_back("gamma window exp(j^8) <= gamma_j <= 2 exp(j^8) violated" + at);
      }
      if (std::abs(lv.delta_j - 1.0 / j8) > (1.0 / ipow(j, 9)) * (1 + 1e-12)) {
        bad.push_back("delta window |delta_j - j^-8| <= j^-9 violated" + at);
      }
      const double centre = (c.xi - std::numbers::pi / 2) / (j8 * j8);
      if (std::abs(lv.theta_j - centre) > (1.0 / ipow(j, 17)) * (1 + 1e-12)) {
        bad.push_back("theta window |theta_j - (xi - pi/2) j^-16| <= j^-17 violated" + at);
      }
    }
    if (!(lg > std::log(c.A))) bad.push_back("j0 condition gamma_j > A violated" + at);
    if (!(lv.delta_j <= c.delta)) {
      bad.push_back("j0 condition delta_j <= delta violated" + at + " (delta_j = " + fmt_double(lv.delta_j) + ")");
    }
    if (!(lv.delta_j >= 0.0)) bad.push_back("delta_j must be nonnegative" + at);
    if (!(lv.beta(c.sigma) > 0.0 && lv.beta(c.sigma) < 1.0)) bad.push_back("real part sigma - delta_j outside (0, 1)" + at);
    if (!(1.0 + lv.theta_j * std::exp(-lg) > 0.0)) bad.push_back("gamma_j + theta_j must be positive" + at);
  }
  return bad;
}

std::uint64_t level_multiplicity(int j, std::uint64_t k) {
  const auto jj = static_cast<std::uint64_t>(j);
  const std::uint64_t L = jj * jj * jj;
  if (k < 1 || k > L) throw DomainError("level_multiplicity: k outside [1, j^3]");
  return k * (L + 1 - k);
}

std::uint64_t level_total_multiplicity(int j) {
  const auto jj = static_cast<std::uint64_t>(j);
  const std::uint64_t L = jj * jj * jj;
  return L * (L + 1) * (L + 2) / 6;
}

ZeroMultiset build_B(const HypotheticalConstruction& c, std::size_t character) {
  if (const auto bad = validate(c); !bad.empty()) {
    std::string msg = "invalid construction:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw DomainError(msg);
  }
  ZeroMultiset out(c.describe());
  std::vector<Zero> zs;
  for (int j = c.j_min; j <= c.j_max; ++j) {
    const LevelParams lv = c.level(j);
    const double lg = lv.gamma.log_gamma();
    const double theta_over_gamma = lv.theta_j * std::exp(-lg);
    const std::uint64_t L = lv.size();
    for (std::uint64_t k = 1; k <= L; ++k) {
      const double kd = static_cast<double>(k);
      // log(k gamma + theta) = log gamma + log k + log1p(theta / (k gamma))
      zs.push_back({lv.beta(c.sigma), lg + std::log(kd) + std::log1p(theta_over_gamma / kd),
                    level_multiplicity(j, k)});
    }
    if (!c.scaled()) {
      const std::uint64_t peak = level_multiplicity(j, (L + 1) / 2);
      if (static_cast<double>(peak) > std::pow(lg, 0.75)) {
        throw ConsistencyError("multiplicity " + std::to_string(peak) + " exceeds (log gamma)^(3/4) at j=" +
                               std::to_string(j));
      }
    }
  }
  out.add_all(character, zs);
  return out;
}

// ---------------------------------------------------------------------------
// File format

ZeroMultiset parse_zeros(std::istream& in, std::size_t character, const std::string& source) {
  ZeroMultiset out("zeros loaded from " + source);
  std::vector<Zero> zs;
  std::string line;
  std::size_t line_no = 0;

  auto parse_double = [&](std::string_view tok, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
      throw ParseError(std::string("cannot parse ") + what + " '" + std::string(tok) + "'", line_no);
    }
    return v;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() > 3) throw ParseError("expected `beta gamma [multiplicity]`, got " + std::to_string(tok.size()) + " fields", line_no);

    Zero z;
    const std::string& gamma_tok = tok.size() == 1 ? tok[0] : tok[1];
    if (tok.size() >= 2) z.beta = parse_double(tok[0], "beta");
    if (gamma_tok.rfind("log:", 0) == 0) {
      z.log_gamma = parse_double(std::string_view(gamma_tok).substr(4), "log gamma");
    } else {
      const double g = parse_double(gamma_tok, "gamma");
      if (!(g > 0.0)) throw ParseError("gamma must be positive", line_no);
      z.log_gamma = std::log(g);
    }
    if (tok.size() == 3) {
      std::uint64_t m = 0;
      auto [ptr, ec] = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), m);
      if (ec != std::errc() || ptr != tok[2].data() + tok[2].size() || m == 0) {
        throw ParseError("multiplicity must be a positive integer, got '" + tok[2] + "'", line_no);
      }
      z.multiplicity = m;
    }
    if (!(z.beta > 0.0 && z.beta < 1.0)) throw ParseError("beta must lie in (0, 1)", line_no);
    zs.push_back(z);
  }
  if (in.bad()) throw IoError("read failure on " + source);
  out.add_all(character, zs);
  return out;
}

ZeroMultiset load_zeros(const std::filesystem::path& path, std::size_t character) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open zero file " + path.string());
  return parse_zeros(in, character, path.string());
}

void write_zeros(std::ostream& out, const ZeroMultiset& zs, std::size_t character) {
  out << "# beta log:gamma multiplicity\n";
  for (const Zero& z : zs.zeros(character)) {
    out << fmt_double(z.beta) << " log:" << fmt_double(z.log_gamma) << ' ' << z.multiplicity << '\n';
  }
}

ZeroMultiset truncate_log(const ZeroMultiset& zs, double log_x_prime) {
  ZeroMultiset out(zs.provenance());
  for (const auto& [chi, list] : zs.by_character()) {
    std::vector<Zero> kept;
    for (const Zero& z : list) {
      if (z.log_gamma <= log_x_prime) kept.push_back(z);
    }
    out.add_all(chi, kept);
  }
  return out;
}

ZeroMultiset truncate(const ZeroMultiset& zs, double x_prime) {
  if (!(x_prime >= 1.0)) throw DomainError("truncate needs x' >= 1");
  return truncate_log(zs, std::log(x_prime));
}

}  // namespace primerace
