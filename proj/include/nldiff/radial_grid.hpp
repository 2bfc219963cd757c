#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nldiff {

enum class DomainKind { WholeSpaceTruncated, Ball };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

/// Uniform mesh of [0, R] with weights for integrals over the 3D ball of radius R.
///
/// Weights are the trapezoid rule in the radial variable applied to f(ρ)·4πρ², with a
/// three-point backward end correction at ρ = R that makes the rule exact for ρ².
/// The sum of the weights is therefore the ball volume up to rounding, and for
/// integrands that vanish near R the rule is the plain trapezoid rule.
class RadialGrid {
 public:
  static constexpr std::size_t kMinNodes = 8;

  RadialGrid(DomainKind kind, std::size_t n, double radius);

  DomainKind kind() const { return kind_; }
  std::size_t size() const { return r_.size(); }
  double radius() const { return radius_; }
  double spacing() const { return h_; }

  std::span<const double> nodes() const { return r_; }
  std::span<const double> weights() const { return w_; }
  double r(std::size_t i) const { return r_[i]; }
  double w(std::size_t i) const { return w_[i]; }

  /// Same kind, node count and radius.
  bool same_as(const RadialGrid& other) const;

 private:
  DomainKind kind_;
  double radius_;
  double h_;
  std::vector<double> r_;
  std::vector<double> w_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Builds a grid. Ball grids always have R = 1; the radius argument must be 1 (or omitted).
GridPtr make_grid(DomainKind kind, std::size_t n, double radius = 1.0);

/// Samples of a radial function on a grid.
class RadialField {
 public:
  RadialField() = default;
  explicit RadialField(GridPtr grid);
  RadialField(GridPtr grid, std::vector<double> values);

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  bool diverged() const { return diverged_; }
  void mark_diverged() { diverged_ = true; }

  /// True when every sample is finite.
  bool finite() const;
  double max() const;
  double min() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  bool diverged_ = false;
};

/// Thrown when two fields (or a field and a grid) do not share a mesh.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void require_same_grid(const RadialGrid& a, const RadialGrid& b);

/// Σ w[i] f[i].
double integrate(const RadialGrid& grid, const RadialField& f);
double integrate(const RadialField& f);

/// (Σ w[i] |f[i]|^q)^{1/q}; q ≥ 1.
double lq_norm(const RadialField& f, double q);

/// Exact integral of the piecewise-linear interpolant of f against ρ^power over [a, b] ⊂ [0, R].
/// Used for partial radial moments at radii that need not be nodes.
double interpolant_moment(const RadialField& f, double a, double b, int power);

/// Linear interpolation of f at radius x ∈ [0, R].
double interpolate(const RadialField& f, double x);

}  // namespace nldiff
