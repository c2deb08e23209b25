#pragma once

// Zero multisets attached to Dirichlet characters: hypothetical
// off-critical-line constructions and tables loaded from text files.
//
// Imaginary parts are stored as log(gamma) throughout; the hypothetical
// construction reaches gamma = exp(j^8), which overflows a double at j = 3.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace primerace {

struct Zero {
  double beta = 0.5;
  double log_gamma = 0.0;
  std::uint64_t multiplicity = 1;

  double gamma() const;  // exp(log_gamma); may be +inf
  std::complex<double> rho() const { return {beta, gamma()}; }
};

/// Zeros with positive imaginary part, grouped by character index.  Each list
/// is sorted by (log_gamma, beta) and equal zeros are merged by summing
/// multiplicities.
class ZeroMultiset {
 public:
  ZeroMultiset() = default;
  explicit ZeroMultiset(std::string provenance) : provenance_(std::move(provenance)) {}

  void add(std::size_t character, const Zero& z);
  /// Bulk append followed by one sort/merge pass.
  void add_all(std::size_t character, std::span<const Zero> zs);

  std::span<const Zero> zeros(std::size_t character) const;
  const std::map<std::size_t, std::vector<Zero>>& by_character() const noexcept { return lists_; }
  std::size_t distinct_count() const;
  std::uint64_t total_multiplicity() const;
  bool empty() const noexcept { return distinct_count() == 0; }

  const std::string& provenance() const noexcept { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  friend bool operator==(const ZeroMultiset& a, const ZeroMultiset& b);

 private:
  static void normalize(std::vector<Zero>& list);

  std::map<std::size_t, std::vector<Zero>> lists_;
  std::string provenance_;
};

/// gamma = factor * exp(log_base).  Keeping the exponent and the factor apart
/// lets phase reduction rebuild gamma to any precision.
struct GammaSpec {
  double log_base = 0.0;
  double factor = 1.0;

  double log_gamma() const;
};

/// Replaces the j^8 growth law by g(j) = c * j^p and optionally pins gamma_j
/// and delta_j for every level.  Never satisfies the standard windows; used
/// only to make the Fejer mechanism observable at reachable x.
struct ScaleMode {
  double growth_c = 1.0;
  double growth_p = 8.0;
  std::optional<double> gamma_override;
  std::optional<double> delta_override;

  double growth(int j) const;
};

struct LevelParams {
  int j = 0;
  GammaSpec gamma;
  double delta_j = 0.0;
  double theta_j = 0.0;

  std::uint64_t size() const;  // j^3, the number of distinct ordinates k*gamma_j + theta_j
  double beta(double sigma) const { return sigma - delta_j; }
};

struct HypotheticalConstruction {
  using GammaSelector = std::function<GammaSpec(int j)>;
  using DeltaSelector = std::function<double(int j)>;
  using ThetaSelector = std::function<double(int j, double xi)>;

  double xi = 0.0;
  double sigma = 0.75;
  double delta = 0.2;
  double A = 1.0;
  int j_min = 1;
  int j_max = 1;
  // Empty selectors fall back to the window midpoints (scaled if scale_mode).
  GammaSelector gamma_selector;
  DeltaSelector delta_selector;
  ThetaSelector theta_selector;
  std::optional<ScaleMode> scale_mode;

  LevelParams level(int j) const;
  bool scaled() const noexcept { return scale_mode.has_value(); }
  std::string describe() const;
};

/// min(j^-8, delta): the window-valid delta_j closest to the centre that
/// keeps level j inside the strip [sigma - delta, sigma].
HypotheticalConstruction::DeltaSelector clamped_delta_selector(double delta);

/// Every violated constraint (parameter ranges, the gamma/delta/theta windows
/// unless scale mode is active, and the j0 conditions), one message each.
std::vector<std::string> validate(const HypotheticalConstruction& c);

/// k (j^3 + 1 - k)
std::uint64_t level_multiplicity(int j, std::uint64_t k);
/// sum_k k (j^3 + 1 - k) = j^3 (j^3 + 1) (j^3 + 2) / 6
std::uint64_t level_total_multiplicity(int j);

/// The multiset B for the construction, attached to `character`.
/// Throws DomainError listing the violated constraints.
ZeroMultiset build_B(const HypotheticalConstruction& c, std::size_t character = 1);

/// Zero table format: one zero per line, `beta gamma [multiplicity]` or a
/// lone `gamma` (beta = 1/2); `#` starts a comment; gamma may be written
/// `log:<value>` to give log(gamma) directly.
ZeroMultiset parse_zeros(std::istream& in, std::size_t character, const std::string& source = "<stream>");
ZeroMultiset load_zeros(const std::filesystem::path& path, std::size_t character);
/// Writes `beta log:<log_gamma> multiplicity` with round-trip precision.
void write_zeros(std::ostream& out, const ZeroMultiset& zs, std::size_t character);

/// Zeros with log_gamma <= log_x_prime.
ZeroMultiset truncate_log(const ZeroMultiset& zs, double log_x_prime);
ZeroMultiset truncate(const ZeroMultiset& zs, double x_prime);

}  // namespace primerace

