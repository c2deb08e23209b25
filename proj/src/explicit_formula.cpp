#include "primerace/explicit_formula.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "primerace/errors.hpp"
#include "primerace/quadrature.hpp"

namespace primerace {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// Fixed reduction tree: the result depends only on the input order.
template <class T>
T pairwise_sum(const std::vector<T>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 0) return T{};
  if (hi - lo == 1) return v[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::complex<double> conj_value(const CharValue& v) {
  if (!v) return {};
  return (-*v).to_complex();
}

}  // namespace

void FormulaConfig::validate() const {
  if (!(beta_cut >= 0.5 && beta_cut < 1.0)) throw DomainError("beta_cut must lie in [1/2, 1)");
  if (!(quadrature_tol > 0.0 && quadrature_tol <= 1e-6)) throw DomainError("quadrature_tol must lie in (0, 1e-6]");
  if (!(gamma_asymptotic_threshold > 0.0)) throw DomainError("gamma_asymptotic_threshold must be positive");
  if (max_panels == 0) throw DomainError("max_panels must be positive");
  if (x_prime_log && std::isnan(*x_prime_log)) throw DomainError("x_prime_log is NaN");
}

double integral_term_bound(std::complex<double> rho, double x) {
  const double b = rho.real();
  const double r = std::abs(rho);
  const double U = std::log(x);
  const double u0 = kLn2;
  const double xb = std::exp(b * U);
  const double tb = std::exp(b * u0);
  return (xb / (U * U) + tb / (u0 * u0)) / (r * r) + 2.0 * (xb / (U * U * U) + tb / (u0 * u0 * u0)) / (r * r * r) +
         6.0 * (U - u0) * std::max(xb / std::pow(U, 4), tb / std::pow(u0, 4)) / (r * r * r);
}

FRhoResult f_rho(std::complex<double> rho, double x, const FormulaConfig& cfg) {
  if (!(x >= 4.0) || !std::isfinite(x)) throw DomainError("f_rho needs finite x >= 4, got " + std::to_string(x));
  if (!std::isfinite(rho.real()) || !std::isfinite(rho.imag())) throw DomainError("f_rho needs a finite zero");
  const double U = std::log(x);
  const double beta = rho.real();
  const double r = std::abs(rho);
  FRhoResult out;
  // x^rho / (rho U) with the phase gamma log x reduced in extended precision.
  const double phase = reduce_log_phase(rho.imag(), x, cfg.max_phase_bits).radians - std::arg(rho);
  out.leading = std::polar(std::exp(beta * U) / (r * U), phase);
  if (r > cfg.gamma_asymptotic_threshold) {
    out.value = out.leading;
    out.asymptotic = true;
    out.error_bound = integral_term_bound(rho, x);
    return out;
  }
  const double abs_tol = cfg.quadrature_tol * std::abs(out.leading) * r;
  const QuadratureResult q =
      integrate_oscillatory(rho, [](double u) { return 1.0 / (u * u); }, kLn2, U, abs_tol, cfg.max_panels);
  out.value = out.leading + q.value / rho;
  out.error_bound = q.error_estimate / r;
  out.converged = q.converged;
  out.panels = q.panels;
  return out;
}

double x_prime_log(double x_log, const FormulaConfig& cfg) {
  if (cfg.x_prime_log) return std::max(*cfg.x_prime_log, x_log);
  double xp = x_log;
  for (const auto& [j, lg] : cfg.levels) {
    if (lg <= x_log) xp = std::max(xp, 3.0 * std::log(static_cast<double>(j)) + lg);
  }
  return xp;
}

ExplicitResult delta_explicit(double x, const CharacterTable& table, const RacePhase& race, const ZeroMultiset& zs,
                              const FormulaConfig& cfg) {
  cfg.validate();
  if (!(x >= 4.0) || !std::isfinite(x)) throw DomainError("delta_explicit needs finite x >= 4");
  if (race.q != table.modulus()) throw DomainError("race modulus does not match the character table");
  const double x_log = std::log(x);
  ExplicitResult res;
  res.x_prime_log = x_prime_log(x_log, cfg);
  res.diagnostic_error = std::exp(cfg.beta_cut * x_log) * x_log * x_log;
  for (const auto& [j, lg] : cfg.levels) {
    if (lg <= res.x_prime_log && res.x_prime_log < lg + 3.0 * std::log(static_cast<double>(j))) {
      res.partially_truncated_levels.push_back(j);
    }
  }

  struct Item {
    std::complex<double> rho;
    double mult;
    std::complex<double> coef;  // conj chi(a) - conj chi(b)
  };
  std::vector<Item> items;
  for (const auto& [chi_index, list] : zs.by_character()) {
    if (list.empty()) continue;
    if (chi_index >= table.size()) throw DomainError("zeros attached to an unknown character index");
    const Character chi = table.character(chi_index);
    if (chi.is_principal()) throw DomainError("zeros attached to the principal character");
    const std::complex<double> coef =
        conj_value(chi(static_cast<std::int64_t>(race.a))) - conj_value(chi(static_cast<std::int64_t>(race.b)));
    for (const Zero& z : list) {
      if (z.beta < cfg.beta_cut || z.log_gamma > res.x_prime_log) continue;
      items.push_back({z.rho(), static_cast<double>(z.multiplicity), coef});
      res.multiplicity_used += z.multiplicity;
    }
  }
  res.zeros_used = items.size();

  std::vector<std::complex<double>> up(items.size()), down(items.size());
  std::vector<double> err(items.size());
  parallel_for(items.size(), cfg.workers, [&](std::size_t i) {
    const Item& it = items[i];
    const FRhoResult fp = f_rho(it.rho, x, cfg);
    const FRhoResult fm = f_rho(std::conj(it.rho), x, cfg);
    up[i] = it.mult * it.coef * fp.value;
    down[i] = it.mult * std::conj(it.coef) * fm.value;
    err[i] = 2.0 * it.mult * std::abs(it.coef) * fp.error_bound;
  });
  const std::complex<double> s_up = pairwise_sum(up, 0, up.size());
  const std::complex<double> s_down = pairwise_sum(down, 0, down.size());
  const std::complex<double> total = -(s_up + s_down);
  res.value = total.real();
  res.imaginary_residue = std::abs(total.imag());
  res.certified_error = pairwise_sum(err, 0, err.size());
  const double scale = std::max(std::abs(s_up), std::abs(total));
  if (res.imaginary_residue > 1e-9 * scale + std::numeric_limits<double>::min()) {
    throw ConsistencyError("conjugate terms fail to cancel: imaginary residue " + std::to_string(res.imaginary_residue));
  }
  return res;
}

int level_J(double x_log) {
  if (!(x_log > 0.0)) return 0;
  auto J = static_cast<int>(std::floor(std::pow(x_log, 1.0 / 16.0)));
  while (J > 0 && std::pow(static_cast<double>(J), 16.0) > x_log) --J;
  while (std::pow(static_cast<double>(J + 1), 16.0) <= x_log) ++J;
  return J;
}

LevelWindow main_term_window(const HypotheticalConstruction& c, double x_log) {
  if (c.scaled()) return {c.j_min, c.j_max};
  const int J = level_J(x_log);
  const auto spread = static_cast<int>(std::floor(std::pow(static_cast<double>(J), 0.75) + 1e-12));
  return {std::max(J - spread, c.j_min), std::min(J + spread, c.j_max)};
}

double level_log_magnitude(const HypotheticalConstruction& c, int j, double x_log, double race_magnitude) {
  const LevelParams lv = c.level(j);
  return std::log(2.0 * race_magnitude) + lv.beta(c.sigma) * x_log - lv.gamma.log_gamma() - std::log(x_log);
}

MainTerm delta_main_hypothetical(double x_log, const HypotheticalConstruction& c, const RacePhase& race,
                                 unsigned max_bits) {
  if (!(x_log > 0.0) || !std::isfinite(x_log)) throw DomainError("delta_main_hypothetical needs finite log x > 0");
  if (!(race.magnitude > 0.0)) throw DomainError("race phase has zero magnitude");
  MainTerm out;
  out.J = level_J(x_log);
  out.window = main_term_window(c, x_log);
  for (int j = out.window.lo; j <= out.window.hi; ++j) {
    LevelTerm t;
    t.j = j;
    t.log_magnitude = level_log_magnitude(c, j, x_log, race.magnitude);
    t.fejer = level_fejer(c, j, x_log, max_bits);
    if (t.fejer != 0.0) {
      t.term = SignedLogValue::from_real_log(t.log_magnitude + std::log(std::abs(t.fejer)), t.fejer > 0 ? 1 : -1);
    }
    out.value += t.term;
    out.levels.push_back(t);
  }
  return out;
}

}  // namespace primerace
