#include "alterna/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "alterna/numerics.hpp"
#include "json.hpp"

namespace alterna {

namespace {

// Node budget guard for tensor rules; beyond this the setup is a mistake.
constexpr double kMaxTensorNodes = 5e8;

std::size_t checked_pow(int q, int e, const char* what) {
  double approx = std::pow(double(q), double(e));
  if (approx > kMaxTensorNodes)
    throw std::invalid_argument(std::string(what) + ": tensor rule would need " +
                                std::to_string(approx) + " nodes; use monte_carlo");
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= std::size_t(q);
  return r;
}

RuleKind parse_rule(const std::string& s) {
  if (s == "gauss") return RuleKind::gauss;
  if (s == "monte_carlo") return RuleKind::monte_carlo;
  throw std::invalid_argument("quadrature config: unknown rule '" + s + "'");
}

const char* rule_name(RuleKind k) { return k == RuleKind::gauss ? "gauss" : "monte_carlo"; }

}  // namespace

DomainSpec DomainSpec::make_box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.empty() || lo.size() != hi.size())
    throw std::invalid_argument("box domain: lo and hi must have equal nonzero length");
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (!(lo[k] < hi[k])) throw std::invalid_argument("box domain: lo < hi violated at axis " + std::to_string(k));
  DomainSpec d;
  d.kind = Kind::box;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

DomainSpec DomainSpec::make_ball(std::vector<double> center, double radius) {
  if (center.empty()) throw std::invalid_argument("ball domain: empty center");
  if (!(radius > 0.0)) throw std::invalid_argument("ball domain: radius must be positive");
  DomainSpec d;
  d.kind = Kind::ball;
  d.center = std::move(center);
  d.radius = radius;
  return d;
}

int DomainSpec::dim() const { return int(kind == Kind::box ? lo.size() : center.size()); }

bool DomainSpec::contains(std::span<const double> x) const {
  if (int(x.size()) != dim()) throw std::invalid_argument("domain contains: dimension mismatch");
  if (kind == Kind::box) {
    for (std::size_t k = 0; k < lo.size(); ++k)
      if (x[k] < lo[k] || x[k] > hi[k]) return false;
    return true;
  }
  double r2 = 0.0;
  for (std::size_t k = 0; k < center.size(); ++k) r2 += (x[k] - center[k]) * (x[k] - center[k]);
  return r2 <= radius * radius;
}

double DomainSpec::boundary_distance(std::span<const double> x) const {
  if (int(x.size()) != dim()) throw std::invalid_argument("domain boundary_distance: dimension mismatch");
  if (kind == Kind::ball) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < center.size(); ++k) r2 += (x[k] - center[k]) * (x[k] - center[k]);
    return std::abs(std::sqrt(r2) - radius);
  }
  bool inside = true;
  double inner = std::numeric_limits<double>::infinity(), outer2 = 0.0;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (x[k] < lo[k] || x[k] > hi[k]) inside = false;
    inner = std::min({inner, x[k] - lo[k], hi[k] - x[k]});
    double ex = std::max({0.0, lo[k] - x[k], x[k] - hi[k]});
    outer2 += ex * ex;
  }
  return inside ? inner : std::sqrt(outer2);
}

double DomainSpec::volume() const {
  if (kind == Kind::box) {
    double v = 1.0;
    for (std::size_t k = 0; k < lo.size(); ++k) v *= hi[k] - lo[k];
    return v;
  }
  int d = dim();
  return sphere_area(d) / d * std::pow(radius, d);
}

QuadratureConfig QuadratureConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("quadrature config: invalid JSON: ") + e.what());
  }
  QuadratureConfig c;
  if (j.contains("boundary")) {
    const auto& b = j.at("boundary");
    if (b.contains("rule")) c.boundary_rule = parse_rule(b.at("rule").get<std::string>());
    if (b.contains("q")) c.boundary_q = b.at("q").get<int>();
    if (b.contains("samples")) c.boundary_samples = b.at("samples").get<long long>();
  }
  if (j.contains("volume")) {
    const auto& v = j.at("volume");
    if (v.contains("rule")) c.volume_rule = parse_rule(v.at("rule").get<std::string>());
    if (v.contains("q")) c.volume_q = v.at("q").get<int>();
    if (v.contains("samples")) c.volume_samples = v.at("samples").get<long long>();
  }
  if (j.contains("pv_epsilons")) c.pv_epsilons = j.at("pv_epsilons").get<std::vector<double>>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (c.boundary_q < 1 || c.volume_q < 1)
    throw std::invalid_argument("quadrature config: q must be >= 1");
  if (c.boundary_samples < 2 || c.volume_samples < 2)
    throw std::invalid_argument("quadrature config: samples must be >= 2");
  return c;
}

std::string QuadratureConfig::to_json_text() const {
  nlohmann::ordered_json j;
  j["boundary"] = {{"rule", rule_name(boundary_rule)}, {"q", boundary_q}, {"samples", boundary_samples}};
  j["volume"] = {{"rule", rule_name(volume_rule)}, {"q", volume_q}, {"samples", volume_samples}};
  j["pv_epsilons"] = pv_epsilons;
  j["seed"] = seed;
  j["threads"] = threads;
  return j.dump(2);
}

SphereRule sphere_rule(int d, int q) {
  SphereRule r;
  if (q < 1) throw std::invalid_argument("sphere_rule: q must be >= 1");
  if (d == 1) {
    r.dirs = {{1, 0, 0, 0}, {-1, 0, 0, 0}};
    r.ws = {1.0, 1.0};
    return r;
  }
  const GaussRule& g = gauss_legendre(q);
  if (d == 2) {
    for (int i = 0; i < q; ++i) {
      double th = M_PI * (g.x[i] + 1.0);
      r.dirs.push_back({std::cos(th), std::sin(th), 0, 0});
      r.ws.push_back(M_PI * g.w[i]);
    }
    return r;
  }
  if (d == 3) {
    // theta: polar in [0, pi] with sin(theta) weight; phi: azimuth.
    for (int a = 0; a < q; ++a) {
      double th = 0.5 * M_PI * (g.x[a] + 1.0), wth = 0.5 * M_PI * g.w[a] * std::sin(th);
      for (int b = 0; b < q; ++b) {
        double ph = M_PI * (g.x[b] + 1.0);
        r.dirs.push_back({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th), 0});
        r.ws.push_back(wth * M_PI * g.w[b]);
      }
    }
    return r;
  }
  if (d == 4) {
    // psi, theta polar with sin^2(psi) sin(theta); total weight 2 pi^2.
    for (int a = 0; a < q; ++a) {
      double ps = 0.5 * M_PI * (g.x[a] + 1.0);
      double wps = 0.5 * M_PI * g.w[a] * std::sin(ps) * std::sin(ps);
      for (int b = 0; b < q; ++b) {
        double th = 0.5 * M_PI * (g.x[b] + 1.0), wth = 0.5 * M_PI * g.w[b] * std::sin(th);
        for (int c = 0; c < q; ++c) {
          double ph = M_PI * (g.x[c] + 1.0);
          r.dirs.push_back({std::cos(ps), std::sin(ps) * std::cos(th),
                            std::sin(ps) * std::sin(th) * std::cos(ph),
                            std::sin(ps) * std::sin(th) * std::sin(ph)});
          r.ws.push_back(wps * wth * M_PI * g.w[c]);
        }
      }
    }
    return r;
  }
  throw std::invalid_argument("sphere_rule: tensor rules stop at d = 4; use monte_carlo");
}

BoundaryRule::BoundaryRule(const DomainSpec& domain, const QuadratureConfig& config, int stride, int n)
    : dom_(domain), stride_(stride), n_(n), dim_(stride * n) {
  if (dom_.dim() != dim_)
    throw std::invalid_argument("BoundaryRule: domain dimension " + std::to_string(dom_.dim()) +
                                " != stride*n = " + std::to_string(dim_));
  mc_ = config.boundary_rule == RuleKind::monte_carlo;
  q_ = config.boundary_q;
  samples_ = config.boundary_samples;
  seed_ = config.seed;
  if (mc_) {
    size_ = std::size_t(samples_);
    double area = dom_.kind == DomainSpec::Kind::ball
                      ? sphere_area(dim_) * std::pow(dom_.radius, dim_ - 1)
                      : [&] {
                          double a = 0.0;
                          for (int k = 0; k < dim_; ++k) {
                            double f = 2.0;
                            for (int l = 0; l < dim_; ++l)
                              if (l != k) f *= dom_.hi[l] - dom_.lo[l];
                            a += f;
                          }
                          return a;
                        }();
    spacing_ = std::pow(area / double(samples_), 1.0 / double(std::max(1, dim_ - 1)));
    return;
  }
  if (dom_.kind == DomainSpec::Kind::box) {
    gl_ = &gauss_legendre(q_);
    per_face_ = checked_pow(q_, dim_ - 1, "BoundaryRule");
    size_ = per_face_ * 2 * std::size_t(dim_);
    double ext = 0.0;
    for (int k = 0; k < dim_; ++k) ext = std::max(ext, dom_.hi[k] - dom_.lo[k]);
    spacing_ = 0.5 * ext * M_PI / q_;  // Gauss nodes: widest interior gap
  } else {
    SphereRule sr = sphere_rule(dim_, q_);  // throws for dim > 4
    sphere_dirs_ = std::move(sr.dirs);
    sphere_ws_ = std::move(sr.ws);
    size_ = sphere_ws_.size();
    spacing_ = dom_.radius * M_PI / q_;
  }
}

BoundaryNode BoundaryRule::node(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("BoundaryRule::node");
  BoundaryNode nd{MultiPoint(n_, stride_), MultiPoint(n_, stride_), 0.0};
  if (mc_) {
    Rng rng(mix_seed(seed_, i));
    if (dom_.kind == DomainSpec::Kind::ball) {
      double r2 = 0.0;
      std::array<double, kMaxAlgebraDim> dir{};
      for (int k = 0; k < dim_; ++k) {
        dir[k] = rng.normal();
        r2 += dir[k] * dir[k];
      }
      double inv = 1.0 / std::sqrt(r2);
      for (int k = 0; k < dim_; ++k) {
        nd.normal[k] = dir[k] * inv;
        nd.point[k] = dom_.center[k] + dom_.radius * nd.normal[k];
      }
      nd.weight = sphere_area(dim_) * std::pow(dom_.radius, dim_ - 1) / double(samples_);
      return nd;
    }
    // Box: face chosen with probability proportional to its area, then a
    // uniform point on it, so a constant weight total_area/samples is correct.
    std::vector<double> areas(2 * dim_);
    double total = 0.0;
    for (int k = 0; k < dim_; ++k) {
      double f = 1.0;
      for (int l = 0; l < dim_; ++l)
        if (l != k) f *= dom_.hi[l] - dom_.lo[l];
      areas[2 * k] = areas[2 * k + 1] = f;
      total += 2 * f;
    }
    double pick = rng.uniform01() * total, acc = 0.0;
    int face = 2 * dim_ - 1;
    for (int f = 0; f < 2 * dim_; ++f) {
      acc += areas[f];
      if (pick <= acc) {
        face = f;
        break;
      }
    }
    int k = face / 2, side = face % 2;
    nd.point[k] = side ? dom_.hi[k] : dom_.lo[k];
    nd.normal[k] = side ? 1.0 : -1.0;
    for (int l = 0; l < dim_; ++l)
      if (l != k) nd.point[l] = rng.uniform(dom_.lo[l], dom_.hi[l]);
    nd.weight = total / double(samples_);
    return nd;
  }
  if (dom_.kind == DomainSpec::Kind::box) {
    const GaussRule& g = *gl_;
    std::size_t face = i / per_face_, r = i % per_face_;
    int k = int(face) / 2, side = int(face) % 2;
    nd.point[k] = side ? dom_.hi[k] : dom_.lo[k];
    nd.normal[k] = side ? 1.0 : -1.0;
    double w = 1.0;
    for (int l = 0; l < dim_; ++l) {
      if (l == k) continue;
      int d = int(r % std::size_t(q_));
      r /= std::size_t(q_);
      double half = 0.5 * (dom_.hi[l] - dom_.lo[l]), mid = 0.5 * (dom_.hi[l] + dom_.lo[l]);
      nd.point[l] = mid + half * g.x[d];
      w *= half * g.w[d];
    }
    nd.weight = w;
    return nd;
  }
  const auto& dir = sphere_dirs_[i];
  for (int k = 0; k < dim_; ++k) {
    nd.normal[k] = dir[std::size_t(k)];
    nd.point[k] = dom_.center[k] + dom_.radius * dir[std::size_t(k)];
  }
  nd.weight = sphere_ws_[i] * std::pow(dom_.radius, dim_ - 1);
  return nd;
}

VolumeRule::VolumeRule(const DomainSpec& domain, const QuadratureConfig& config, int stride, int n)
    : dom_(domain), stride_(stride), n_(n), dim_(stride * n) {
  if (dom_.dim() != dim_)
    throw std::invalid_argument("VolumeRule: domain dimension " + std::to_string(dom_.dim()) +
                                " != stride*n = " + std::to_string(dim_));
  mc_ = config.volume_rule == RuleKind::monte_carlo;
  q_ = config.volume_q;
  samples_ = config.volume_samples;
  seed_ = config.seed;
  if (mc_) {
    size_ = std::size_t(samples_);
    return;
  }
  gl_ = &gauss_legendre(q_);
  if (dom_.kind == DomainSpec::Kind::box) {
    size_ = checked_pow(q_, dim_, "VolumeRule");
  } else {
    SphereRule sr = sphere_rule(dim_, q_);  // throws for dim > 4
    sphere_dirs_ = std::move(sr.dirs);
    sphere_ws_ = std::move(sr.ws);
    size_ = sphere_ws_.size() * std::size_t(q_);
  }
}

VolumeRule::Node VolumeRule::node(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("VolumeRule::node");
  Node nd{MultiPoint(n_, stride_), 0.0};
  if (mc_) {
    Rng rng(mix_seed(seed_ ^ 0x5A5A5A5A5A5A5A5Aull, i));  // decorrelated from boundary stream
    if (dom_.kind == DomainSpec::Kind::box) {
      for (int k = 0; k < dim_; ++k) nd.point[k] = rng.uniform(dom_.lo[k], dom_.hi[k]);
    } else {
      double r2 = 0.0;
      std::array<double, kMaxAlgebraDim> dir{};
      for (int k = 0; k < dim_; ++k) {
        dir[k] = rng.normal();
        r2 += dir[k] * dir[k];
      }
      double rad = dom_.radius * std::pow(rng.uniform01(), 1.0 / dim_) / std::sqrt(r2);
      for (int k = 0; k < dim_; ++k) nd.point[k] = dom_.center[k] + rad * dir[k];
    }
    nd.weight = dom_.volume() / double(samples_);
    return nd;
  }
  const GaussRule& g = *gl_;
  if (dom_.kind == DomainSpec::Kind::box) {
    std::size_t r = i;
    double w = 1.0;
    for (int k = 0; k < dim_; ++k) {
      int d = int(r % std::size_t(q_));
      r /= std::size_t(q_);
      double half = 0.5 * (dom_.hi[k] - dom_.lo[k]), mid = 0.5 * (dom_.hi[k] + dom_.lo[k]);
      nd.point[k] = mid + half * g.x[d];
      w *= half * g.w[d];
    }
    nd.weight = w;
    return nd;
  }
  // Polar: radius node times sphere node; dV = (R t)^(d-1) R dt dOmega.
  std::size_t a = i / std::size_t(q_);
  int ri = int(i % std::size_t(q_));
  double t = 0.5 * (g.x[ri] + 1.0), rad = dom_.radius * t;
  const auto& dir = sphere_dirs_[a];
  for (int k = 0; k < dim_; ++k) nd.point[k] = dom_.center[k] + rad * dir[std::size_t(k)];
  nd.weight = sphere_ws_[a] * std::pow(rad, dim_ - 1) * dom_.radius * 0.5 * g.w[ri];
  return nd;
}

ReduceStats reduce_indexed(std::size_t count, int dim, int threads,
                           const std::function<Element(std::size_t)>& contrib) {
  constexpr std::size_t kBlock = 4096;
  ReduceStats out{Element(dim), Element(dim), count};
  if (count == 0) return out;
  std::size_t nblocks = (count + kBlock - 1) / kBlock;
  auto run_block = [&](std::size_t b, Element& s, Element& s2) {
    std::size_t i0 = b * kBlock, i1 = std::min(count, i0 + kBlock);
    for (std::size_t i = i0; i < i1; ++i) {
      Element c = contrib(i);
      if (!all_finite(c))
        throw std::runtime_error("integration: non-finite contribution at node " + std::to_string(i));
      s += c;
      for (int k = 0; k < dim; ++k) s2[k] += c[k] * c[k];
    }
  };
  int T = std::max(1, threads);
  if (T == 1 || nblocks == 1) {
    for (std::size_t b = 0; b < nblocks; ++b) {
      Element s(dim), s2(dim);
      run_block(b, s, s2);
      out.sum += s;
      out.sum_sq += s2;
    }
    return out;
  }
  // Parallel over blocks; block partials are still combined in index order,
  // so the result is bitwise independent of the thread count.
  std::vector<Element> ps(nblocks, Element(dim)), ps2(nblocks, Element(dim));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(T));
  std::vector<std::thread> pool;
  for (int t = 0; t < T; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t b = next.fetch_add(1); b < nblocks; b = next.fetch_add(1))
          run_block(b, ps[b], ps2[b]);
      } catch (...) {
        errs[std::size_t(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  for (std::size_t b = 0; b < nblocks; ++b) {
    out.sum += ps[b];
    out.sum_sq += ps2[b];
  }
  return out;
}

double reduce_std_err(const ReduceStats& st) {
  double N = double(st.count), v = 0.0;
  if (st.count < 2) return 0.0;
  for (int k = 0; k < st.sum.dim(); ++k) {
    // Var(sum) = N Var(contribution), estimated from the sample variance.
    double var = (st.sum_sq[k] - st.sum[k] * st.sum[k] / N) * N / (N - 1.0);
    v += std::max(0.0, var);
  }
  return std::sqrt(v);
}

IntegralResult integrate_boundary(const DomainSpec& domain, const QuadratureConfig& config,
                                  int stride, int n,
                                  const std::function<Element(const BoundaryNode&)>& g) {
  BoundaryRule rule(domain, config, stride, n);
  Element probe = g(rule.node(0));
  auto contrib = [&](std::size_t i) {
    BoundaryNode nd = rule.node(i);
    return g(nd) * nd.weight;
  };
  ReduceStats st = reduce_indexed(rule.size(), probe.dim(), config.threads, contrib);
  return {st.sum, rule.is_monte_carlo() ? reduce_std_err(st) : 0.0};
}

IntegralResult integrate_volume(const DomainSpec& domain, const QuadratureConfig& config,
                                int stride, int n,
                                const std::function<Element(const MultiPoint&)>& g) {
  VolumeRule rule(domain, config, stride, n);
  Element probe = g(rule.node(0).point);
  auto contrib = [&](std::size_t i) {
    VolumeRule::Node nd = rule.node(i);
    return g(nd.point) * nd.weight;
  };
  ReduceStats st = reduce_indexed(rule.size(), probe.dim(), config.threads, contrib);
  return {st.sum, rule.is_monte_carlo() ? reduce_std_err(st) : 0.0};
}

}  // namespace alterna
