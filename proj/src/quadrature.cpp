#include "primerace/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

constexpr std::size_t kNodes = 32;   // Gauss-Legendre nodes per panel
constexpr std::size_t kCoeffs = 20;  // Legendre coefficients kept

struct LegendreRule {
  std::array<double, kNodes> t{};
  std::array<double, kNodes> w{};
  // p[n][i] = P_n(t_i)
  std::array<std::array<double, kNodes>, kCoeffs> p{};

  LegendreRule() {
    for (std::size_t i = 0; i < kNodes; ++i) {
      double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (kNodes + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (std::size_t n = 2; n <= kNodes; ++n) {
          const double p2 = ((2.0 * n - 1) * x * p1 - (n - 1.0) * p0) / static_cast<double>(n);
          p0 = p1;
          p1 = p2;
        }
        dp = kNodes * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      t[i] = x;
      w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    for (std::size_t i = 0; i < kNodes; ++i) {
      p[0][i] = 1.0;
      p[1][i] = t[i];
      for (std::size_t n = 2; n < kCoeffs; ++n) {
        p[n][i] = ((2.0 * n - 1) * t[i] * p[n - 1][i] - (n - 1.0) * p[n - 2][i]) / static_cast<double>(n);
      }
    }
  }
};

const LegendreRule& rule() {
  static const LegendreRule r;
  return r;
}

struct Panel {
  double lo, hi;
  std::complex<double> value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace

void sph_bessel_sequence(double x, std::span<double> out) {
  const std::size_t N = out.size();
  if (N == 0) return;
  const bool odd_flip = x < 0;
  const double ax = std::abs(x);
  if (ax == 0.0) {
    out[0] = 1.0;
    for (std::size_t n = 1; n < N; ++n) out[n] = 0.0;
    return;
  }
  if (ax < 1.0) {
    // Power series: j_n(x) = x^n/(2n+1)!! sum_k (-x^2/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1))
    double lead = 1.0;  // x^n / (2n+1)!!
    for (std::size_t n = 0; n < N; ++n) {
      if (n > 0) lead *= ax / static_cast<double>(2 * n + 1);
      double term = 1.0, sum = 1.0;
      for (int k = 1; k < 40; ++k) {
        term *= -0.5 * ax * ax / (k * (2.0 * static_cast<double>(n) + 2.0 * k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      }
      out[n] = lead * sum;
    }
  } else if (ax >= static_cast<double>(N)) {
    // Upward recurrence is stable while n < x.
    out[0] = std::sin(ax) / ax;
    if (N > 1) out[1] = std::sin(ax) / (ax * ax) - std::cos(ax) / ax;
    for (std::size_t n = 1; n + 1 < N; ++n) {
      out[n + 1] = (2.0 * static_cast<double>(n) + 1.0) / ax * out[n] - out[n - 1];
    }
  } else {
    // Miller's downward recurrence, normalised by j_0 or j_1.
    const auto start = static_cast<std::size_t>(N + 30 + ax);
    std::vector<double> tmp(start + 2, 0.0);
    tmp[start] = 1e-300;
    for (std::size_t n = start; n > 0; --n) {
      tmp[n - 1] = (2.0 * static_cast<double>(n) + 1.0) / ax * tmp[n] - tmp[n + 1];
      if (std::abs(tmp[n - 1]) > 1e250) {
        for (std::size_t m = n - 1; m <= start + 1; ++m) tmp[m] *= 1e-250;
      }
    }
    const double j0 = std::sin(ax) / ax;
    const double j1 = std::sin(ax) / (ax * ax) - std::cos(ax) / ax;
    const double scale = std::abs(j0) >= std::abs(j1) ? j0 / tmp[0] : j1 / tmp[1];
    for (std::size_t n = 0; n < N; ++n) out[n] = tmp[n] * scale;
  }
  if (odd_flip) {
    for (std::size_t n = 1; n < N; n += 2) out[n] = -out[n];
  }
}

double sph_bessel(unsigned n, double x) {
  std::vector<double> v(n + 1);
  sph_bessel_sequence(x, v);
  return v[n];
}

QuadratureResult integrate_oscillatory(std::complex<double> rho, const std::function<double(double)>& smooth,
                                       double a, double b, double abs_tol, std::size_t max_panels) {
  if (!(b > a)) throw DomainError("integrate_oscillatory needs b > a");
  const LegendreRule& R = rule();
  const double beta = rho.real();
  const double gamma = rho.imag();

  auto eval_panel = [&](double lo, double hi) {
    const double m = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    std::array<double, kNodes> f{};
    for (std::size_t i = 0; i < kNodes; ++i) {
      const double t = R.t[i];
      f[i] = std::exp(beta * h * t) * smooth(m + h * t);
    }
    std::array<double, kCoeffs> c{};
    for (std::size_t n = 0; n < kCoeffs; ++n) {
      double s = 0.0;
      for (std::size_t i = 0; i < kNodes; ++i) s += R.w[i] * f[i] * R.p[n][i];
      c[n] = (2.0 * static_cast<double>(n) + 1.0) / 2.0 * s;
    }
    std::array<double, kCoeffs> jn{};
    sph_bessel_sequence(gamma * h, jn);
    // sum_n c_n 2 i^n j_n(w); i^n cycles 1, i, -1, -i.
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < kCoeffs; ++n) {
      const double v = 2.0 * c[n] * jn[n];
      switch (n % 4) {
        case 0: re += v; break;
        case 1: im += v; break;
        case 2: re -= v; break;
        default: im -= v; break;
      }
    }
    const std::complex<double> scale = h * std::exp(rho * m);
    const double mag = h * std::exp(beta * m);
    // Dropped terms contribute c_n * 2 j_n(w) with |j_n(w)| <= min(1, 1.5/|w|).
    const double damp = std::min(1.0, 1.5 / std::abs(gamma * h));
    const double tail = 2.0 * damp * (std::abs(c[kCoeffs - 1]) + std::abs(c[kCoeffs - 2]));
    return Panel{lo, hi, scale * std::complex<double>(re, im), mag * tail};
  };

  std::priority_queue<Panel> heap;
  std::vector<Panel> done;
  heap.push(eval_panel(a, b));
  double total_error = heap.top().error;
  std::size_t count = 1;
  while (total_error > abs_tol && count < max_panels) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {  // cannot split further
      done.push_back(worst);
      if (heap.empty()) break;
      continue;
    }
    Panel left = eval_panel(worst.lo, mid);
    Panel right = eval_panel(mid, worst.hi);
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }

  // Sum in ascending panel order so the result does not depend on heap layout.
  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.lo < y.lo; });
  QuadratureResult out;
  double err = 0.0;
  for (const Panel& p : done) {
    out.value += p.value;
    err += p.error;
  }
  out.error_estimate = err;
  out.panels = done.size();
  out.converged = err <= abs_tol;
  return out;
}

}  // namespace primerace
