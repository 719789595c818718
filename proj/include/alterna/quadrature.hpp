#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "alterna/subspace.hpp"

namespace alterna {

struct GaussRule;

struct DomainSpec {
  enum class Kind { box, ball };
  Kind kind = Kind::box;
  std::vector<double> lo, hi;  // box
  std::vector<double> center;  // ball
  double radius = 0.0;

  static DomainSpec make_box(std::vector<double> lo, std::vector<double> hi);
  static DomainSpec make_ball(std::vector<double> center, double radius);

  int dim() const;
  bool contains(std::span<const double> x) const;
  // Distance from x to the boundary surface (0 when x lies on it).
  double boundary_distance(std::span<const double> x) const;
  double volume() const;
};

enum class RuleKind { gauss, monte_carlo };

struct QuadratureConfig {
  RuleKind boundary_rule = RuleKind::gauss;
  int boundary_q = 16;
  long long boundary_samples = 200000;
  RuleKind volume_rule = RuleKind::gauss;
  int volume_q = 12;
  long long volume_samples = 200000;
  std::vector<double> pv_epsilons = {0.4, 0.2, 0.1, 0.05};
  std::uint64_t seed = 42;
  int threads = 1;

  static QuadratureConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
};

struct BoundaryNode {
  MultiPoint point;
  MultiPoint normal;  // unit outward
  double weight;
};

// Indexable lazy node stream over the boundary of a domain. Gauss tensor
// grids per box face; for balls a spherical-angle tensor grid (dim <= 4) or
// seeded Monte Carlo directions with weight area/samples.
class BoundaryRule {
 public:
  BoundaryRule(const DomainSpec& domain, const QuadratureConfig& config, int stride, int n);
  std::size_t size() const { return size_; }
  BoundaryNode node(std::size_t i) const;
  bool is_monte_carlo() const { return mc_; }
  // Approximate spacing between neighbouring nodes (ill-conditioning checks).
  double node_spacing() const { return spacing_; }

 private:
  DomainSpec dom_;
  int stride_, n_, dim_;
  bool mc_ = false;
  int q_ = 0;
  long long samples_ = 0;
  std::uint64_t seed_ = 0;
  std::size_t size_ = 0, per_face_ = 0;
  double spacing_ = 0.0;
  const GaussRule* gl_ = nullptr;  // cached rule, stable address
  std::vector<std::array<double, 4>> sphere_dirs_;  // tensor ball rule
  std::vector<double> sphere_ws_;
};

// Indexable volume rule: tensor Gauss grid over a box, polar (radius x
// sphere) grid over a ball, or seeded Monte Carlo for high dimensions.
class VolumeRule {
 public:
  struct Node {
    MultiPoint point;
    double weight;
  };
  VolumeRule(const DomainSpec& domain, const QuadratureConfig& config, int stride, int n);
  std::size_t size() const { return size_; }
  Node node(std::size_t i) const;
  bool is_monte_carlo() const { return mc_; }

 private:
  DomainSpec dom_;
  int stride_, n_, dim_;
  bool mc_ = false;
  int q_ = 0;
  long long samples_ = 0;
  std::uint64_t seed_ = 0;
  std::size_t size_ = 0;
  const GaussRule* gl_ = nullptr;
  std::vector<std::array<double, 4>> sphere_dirs_;
  std::vector<double> sphere_ws_;
};

// Unit-sphere tensor rule in dimension d <= 4; weights sum to sphere_area(d).
struct SphereRule {
  std::vector<std::array<double, 4>> dirs;
  std::vector<double> ws;
};
SphereRule sphere_rule(int d, int q);

struct IntegralResult {
  Element value;
  double std_err = 0.0;  // Monte Carlo only, 0 for deterministic rules
};

// Deterministic blocked reduction: contributions are accumulated in fixed
// 4096-node blocks and block partials are combined in index order, so the
// result is bit-identical for any thread count.
struct ReduceStats {
  Element sum;
  Element sum_sq;
  std::size_t count = 0;
};
ReduceStats reduce_indexed(std::size_t count, int dim, int threads,
                           const std::function<Element(std::size_t)>& contrib);

// Standard error of the summed estimate when the contributions are iid
// Monte Carlo samples (euclidean norm over components).
double reduce_std_err(const ReduceStats& stats);

// Boundary integral of g against the surface measure (componentwise).
IntegralResult integrate_boundary(const DomainSpec& domain, const QuadratureConfig& config,
                                  int stride, int n,
                                  const std::function<Element(const BoundaryNode&)>& g);

// Volume integral of g (componentwise).
IntegralResult integrate_volume(const DomainSpec& domain, const QuadratureConfig& config,
                                int stride, int n,
                                const std::function<Element(const MultiPoint&)>& g);

}  // namespace alterna
