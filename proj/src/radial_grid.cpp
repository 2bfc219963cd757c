#include "nldiff/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nldiff {

std::string to_string(DomainKind kind) {
  return kind == DomainKind::Ball ? "ball" : "whole_space";
}

DomainKind domain_kind_from_string(const std::string& name) {
  if (name == "ball") return DomainKind::Ball;
  if (name == "whole_space" || name == "free" || name == "whole_space_truncated") {
    return DomainKind::WholeSpaceTruncated;
  }
  throw std::invalid_argument("unknown domain kind '" + name + "'");
}

RadialGrid::RadialGrid(DomainKind kind, std::size_t n, double radius)
    : kind_(kind), radius_(radius) {
  if (n < kMinNodes) {
    throw std::invalid_argument("n too small: need at least " + std::to_string(kMinNodes) +
                                " nodes, got " + std::to_string(n));
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("non-positive R");
  }
  if (kind == DomainKind::Ball && radius != 1.0) {
    throw std::invalid_argument("ball grids require R = 1");
  }
  h_ = radius / static_cast<double>(n - 1);
  r_.resize(n);
  for (std::size_t i = 0; i < n; ++i) r_[i] = static_cast<double>(i) * h_;
  r_[n - 1] = radius;

  // Trapezoid coefficients in ρ, then the end correction -h²/12·g'(R) with
  // g'(R) ≈ (3g_n - 4g_{n-1} + g_{n-2}) / 2h. The correction at ρ = 0 is absent
  // because g = f·ρ² has g'(0) = 0.
  std::vector<double> c(n, h_);
  c[0] = 0.5 * h_;
  c[n - 1] = 0.5 * h_ - 3.0 * h_ / 24.0;
  c[n - 2] += 4.0 * h_ / 24.0;
  c[n - 3] -= h_ / 24.0;

  constexpr double four_pi = 4.0 * std::numbers::pi;
  w_.resize(n);
  for (std::size_t i = 0; i < n; ++i) w_[i] = four_pi * c[i] * r_[i] * r_[i];
}

bool RadialGrid::same_as(const RadialGrid& other) const {
  return kind_ == other.kind_ && size() == other.size() && radius_ == other.radius_;
}

GridPtr make_grid(DomainKind kind, std::size_t n, double radius) {
  return std::make_shared<const RadialGrid>(kind, n, radius);
}

RadialField::RadialField(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("RadialField requires a grid");
  values_.assign(grid_->size(), 0.0);
}

RadialField::RadialField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("RadialField requires a grid");
  if (values_.size() != grid_->size()) {
    throw GridMismatch("field has " + std::to_string(values_.size()) + " samples, grid has " +
                       std::to_string(grid_->size()) + " nodes");
  }
}

bool RadialField::finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double RadialField::max() const {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

double RadialField::min() const {
  return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

void require_same_grid(const RadialGrid& a, const RadialGrid& b) {
  if (&a != &b && !a.same_as(b)) {
    throw GridMismatch("grid mismatch: field does not live on this grid");
  }
}

double integrate(const RadialGrid& grid, const RadialField& f) {
  require_same_grid(grid, f.grid());
  long double sum = 0.0L;
  const auto w = grid.weights();
  const auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) sum += static_cast<long double>(w[i]) * v[i];
  return static_cast<double>(sum);
}

double integrate(const RadialField& f) { return integrate(f.grid(), f); }

double lq_norm(const RadialField& f, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) {
    throw std::invalid_argument("lq_norm requires finite q >= 1");
  }
  const auto w = f.grid().weights();
  const auto v = f.values();
  long double sum = 0.0L;
  if (q == 1.0) {
    for (std::size_t i = 0; i < v.size(); ++i) sum += static_cast<long double>(w[i]) * std::abs(v[i]);
    return static_cast<double>(sum);
  }
  if (q == 2.0) {
    for (std::size_t i = 0; i < v.size(); ++i) sum += static_cast<long double>(w[i]) * v[i] * v[i];
    return std::sqrt(static_cast<double>(sum));
  }
  // Scale by the max to keep pow() in range for large fields.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sum += static_cast<long double>(w[i]) * std::pow(std::abs(v[i]) / scale, q);
  }
  return scale * std::pow(static_cast<double>(sum), 1.0 / q);
}

double interpolant_moment(const RadialField& f, double a, double b, int power) {
  const auto& grid = f.grid();
  const double R = grid.radius();
  a = std::clamp(a, 0.0, R);
  b = std::clamp(b, 0.0, R);
  if (b <= a) return 0.0;
  const double h = grid.spacing();
  const auto v = f.values();
  const std::size_t n = grid.size();
  const std::size_t first = std::min(static_cast<std::size_t>(a / h), n - 2);
  const std::size_t last = std::min(static_cast<std::size_t>(std::ceil(b / h)), n - 1);

  const auto antiderivative = [](long double x, int p) {
    return std::pow(x, static_cast<long double>(p + 1)) / (p + 1);
  };
  long double total = 0.0L;
  for (std::size_t j = first; j < last && j + 1 < n; ++j) {
    const long double lo = std::max<long double>(grid.r(j), a);
    const long double hi = std::min<long double>(grid.r(j + 1), b);
    if (hi <= lo) continue;
    // f(ρ) = c0 + c1·ρ on this cell.
    const long double c1 = (static_cast<long double>(v[j + 1]) - v[j]) / h;
    const long double c0 = v[j] - c1 * grid.r(j);
    total += c0 * (antiderivative(hi, power) - antiderivative(lo, power)) +
             c1 * (antiderivative(hi, power + 1) - antiderivative(lo, power + 1));
  }
  return static_cast<double>(total);
}

double interpolate(const RadialField& f, double x) {
  const auto& grid = f.grid();
  const double h = grid.spacing();
  const std::size_t n = grid.size();
  if (x <= 0.0) return f[0];
  if (x >= grid.radius()) return f[n - 1];
  const std::size_t j = std::min(static_cast<std::size_t>(x / h), n - 2);
  const double s = (x - grid.r(j)) / h;
  return (1.0 - s) * f[j] + s * f[j + 1];
}

}  // namespace nldiff
