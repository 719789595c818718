#include "alterna/algebra.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace alterna {

namespace {

std::string pair_str(int s, int t) {
  std::ostringstream os;
  os << "(" << s << "," << t << ")";
  return os.str();
}

}  // namespace

void Algebra::build_offsets(std::vector<std::vector<Term>>& rows) {
  off_.assign(dim_ * dim_ + 1, 0);
  terms_.clear();
  for (int i = 0; i < dim_ * dim_; ++i) {
    off_[i] = static_cast<int>(terms_.size());
    for (const Term& t : rows[i])
      if (t.v != 0.0) terms_.push_back(t);
  }
  off_[dim_ * dim_] = static_cast<int>(terms_.size());
}

Algebra::Algebra(int dim, std::string name,
                 const std::vector<std::array<double, 4>>& structure,
                 const std::vector<std::array<double, 3>>& involution,
                 std::vector<std::string> basis_names)
    : dim_(dim), name_(std::move(name)) {
  if (dim < 1 || dim > kMaxAlgebraDim) throw AlgebraError("algebra dimension out of range [1, 32]");
  std::vector<std::vector<Term>> rows(dim * dim);
  for (const auto& e : structure) {
    int s = static_cast<int>(e[0]), t = static_cast<int>(e[1]), u = static_cast<int>(e[2]);
    if (s < 0 || s >= dim || t < 0 || t >= dim || u < 0 || u >= dim)
      throw AlgebraError("structure constant index out of range at " + pair_str(s, t));
    rows[s * dim + t].push_back({u, e[3]});
  }
  build_offsets(rows);

  invo_perm_.assign(dim, -1);
  invo_sign_.assign(dim, 0.0);
  for (const auto& e : involution) {
    int s = static_cast<int>(e[0]), sp = static_cast<int>(e[1]);
    if (s < 0 || s >= dim || sp < 0 || sp >= dim)
      throw AlgebraError("involution index out of range");
    if (invo_perm_[s] != -1) throw AlgebraError("involution defined twice for basis index " + std::to_string(s));
    invo_perm_[s] = sp;
    invo_sign_[s] = e[2];
  }
  for (int s = 0; s < dim; ++s) {
    if (invo_perm_[s] == -1) throw AlgebraError("involution missing for basis index " + std::to_string(s));
    if (invo_sign_[s] != 1.0 && invo_sign_[s] != -1.0)
      throw AlgebraError("involution sign must be +1 or -1 at basis index " + std::to_string(s));
  }

  if (basis_names.empty()) {
    basis_names.reserve(dim);
    for (int s = 0; s < dim; ++s) basis_names.push_back(s == 0 ? "1" : "v" + std::to_string(s));
  }
  if (static_cast<int>(basis_names.size()) != dim)
    throw AlgebraError("basis name count does not match dimension");
  basis_names_ = std::move(basis_names);
}

Element Algebra::basis(int s) const {
  if (s < 0 || s >= dim_) throw std::invalid_argument("basis index out of range");
  Element e(dim_);
  e[s] = 1.0;
  return e;
}

Element Algebra::from_real(double r) const {
  Element e(dim_);
  e[0] = r;
  return e;
}

Element Algebra::mul(const Element& x, const Element& y) const {
  if (x.dim() != dim_ || y.dim() != dim_)
    throw std::invalid_argument("mul: element dimension does not match algebra");
  Element r(dim_);
  for (int s = 0; s < dim_; ++s) {
    double xs = x[s];
    if (xs == 0.0) continue;
    const int row = s * dim_;
    for (int t = 0; t < dim_; ++t) {
      double yt = y[t];
      if (yt == 0.0) continue;
      double c = xs * yt;
      for (int k = off_[row + t]; k < off_[row + t + 1]; ++k) r[terms_[k].u] += c * terms_[k].v;
    }
  }
  return r;
}

Element Algebra::conj(const Element& x) const {
  if (x.dim() != dim_) throw std::invalid_argument("conj: element dimension does not match algebra");
  Element r(dim_);
  for (int s = 0; s < dim_; ++s) r[invo_perm_[s]] += invo_sign_[s] * x[s];
  return r;
}

Element Algebra::trace(const Element& x) const { return x + conj(x); }

Element Algebra::qnorm(const Element& x) const { return mul(x, conj(x)); }

Element Algebra::associator(const Element& x, const Element& y, const Element& z) const {
  return mul(mul(x, y), z) - mul(x, mul(y, z));
}

std::optional<double> Algebra::real_scalar(const Element& x, double tol) const {
  for (int s = 1; s < dim_; ++s)
    if (std::abs(x[s]) > tol) return std::nullopt;
  return x[0];
}

bool Algebra::is_imaginary_unit(const Element& x, double tol) const {
  if (max_abs(trace(x)) > tol) return false;
  Element n = qnorm(x);
  n[0] -= 1.0;
  return max_abs(n) <= tol;
}

bool Algebra::quadratic_cone_contains(const Element& x, double tol) const {
  // Real multiples of the unity belong to the cone unconditionally.
  bool real = true;
  for (int s = 1; s < dim_; ++s)
    if (std::abs(x[s]) > tol) { real = false; break; }
  if (real) return true;
  auto t = real_scalar(trace(x), tol);
  if (!t) return false;
  auto n = real_scalar(qnorm(x), tol);
  if (!n) return false;
  return 4.0 * *n > *t * *t;
}

std::vector<Algebra::Term> Algebra::product_terms(int s, int t) const {
  if (s < 0 || s >= dim_ || t < 0 || t >= dim_) throw std::invalid_argument("product_terms: bad index");
  std::vector<Term> out;
  for (int k = off_[s * dim_ + t]; k < off_[s * dim_ + t + 1]; ++k) out.push_back(terms_[k]);
  return out;
}

void Algebra::validate(double tol) const {
  // Two-sided unit.
  for (int t = 0; t < dim_; ++t) {
    Element l = mul(basis(0), basis(t));
    Element r = mul(basis(t), basis(0));
    Element e = basis(t);
    if (max_abs(l - e) > tol)
      throw AlgebraError("unit law violated: 1 * v" + std::to_string(t) + " != v" + std::to_string(t));
    if (max_abs(r - e) > tol)
      throw AlgebraError("unit law violated: v" + std::to_string(t) + " * 1 != v" + std::to_string(t));
  }
  // Involution fixes 1 and squares to the identity.
  if (invo_perm_[0] != 0 || invo_sign_[0] != 1.0)
    throw AlgebraError("involution does not fix the unity");
  for (int s = 0; s < dim_; ++s) {
    int sp = invo_perm_[s];
    if (invo_perm_[sp] != s || invo_sign_[s] * invo_sign_[sp] != 1.0)
      throw AlgebraError("involution is not an involution at basis index " + std::to_string(s));
  }
  // Anti-homomorphism on all basis pairs.
  for (int s = 0; s < dim_; ++s) {
    for (int t = 0; t < dim_; ++t) {
      Element lhs = conj(mul(basis(s), basis(t)));
      Element rhs = mul(conj(basis(t)), conj(basis(s)));
      if (max_abs(lhs - rhs) > tol)
        throw AlgebraError("involution is not an anti-homomorphism at basis pair " + pair_str(s, t));
    }
  }
  // Alternativity on basis pairs (necessary condition, exact for integer tables).
  for (int s = 0; s < dim_; ++s) {
    for (int t = 0; t < dim_; ++t) {
      if (max_abs(associator(basis(s), basis(s), basis(t))) > tol)
        throw AlgebraError("left alternativity violated at basis pair " + pair_str(s, t));
      if (max_abs(associator(basis(s), basis(t), basis(t))) > tol)
        throw AlgebraError("right alternativity violated at basis pair " + pair_str(s, t));
    }
  }
}

Algebra Algebra::complex_numbers() {
  std::vector<std::array<double, 4>> st = {
      {0, 0, 0, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, -1}};
  std::vector<std::array<double, 3>> invo = {{0, 0, 1}, {1, 1, -1}};
  return Algebra(2, "complex", st, invo, {"1", "i"});
}

Algebra Algebra::quaternions() {
  // 1, i, j, k with i*j = k and cyclic relations.
  static const int tab[4][4][2] = {
      {{0, 1}, {1, 1}, {2, 1}, {3, 1}},
      {{1, 1}, {0, -1}, {3, 1}, {2, -1}},
      {{2, 1}, {3, -1}, {0, -1}, {1, 1}},
      {{3, 1}, {2, 1}, {1, -1}, {0, -1}},
  };
  std::vector<std::array<double, 4>> st;
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t)
      st.push_back({double(s), double(t), double(tab[s][t][0]), double(tab[s][t][1])});
  std::vector<std::array<double, 3>> invo = {{0, 0, 1}, {1, 1, -1}, {2, 2, -1}, {3, 3, -1}};
  return Algebra(4, "quaternions", st, invo, {"1", "i", "j", "k"});
}

Algebra Algebra::octonions() {
  // Doubling of the quaternions: (a,b)(c,d) = (ac - conj(d) b, da + b conj(c)).
  Algebra q = quaternions();
  std::vector<std::array<double, 4>> st;
  for (int s = 0; s < 8; ++s) {
    for (int t = 0; t < 8; ++t) {
      Element a = s < 4 ? q.basis(s) : q.zero();
      Element b = s < 4 ? q.zero() : q.basis(s - 4);
      Element c = t < 4 ? q.basis(t) : q.zero();
      Element d = t < 4 ? q.zero() : q.basis(t - 4);
      Element first = q.mul(a, c) - q.mul(q.conj(d), b);
      Element second = q.mul(d, a) + q.mul(b, q.conj(c));
      for (int u = 0; u < 4; ++u) {
        if (first[u] != 0.0) st.push_back({double(s), double(t), double(u), first[u]});
        if (second[u] != 0.0) st.push_back({double(s), double(t), double(u + 4), second[u]});
      }
    }
  }
  std::vector<std::array<double, 3>> invo;
  invo.push_back({0, 0, 1});
  for (int s = 1; s < 8; ++s) invo.push_back({double(s), double(s), -1});
  std::vector<std::string> names = {"1", "e1", "e2", "e3", "e4", "e5", "e6", "e7"};
  return Algebra(8, "octonions", st, invo, names);
}

namespace {

// Product of blades given as bit masks, generators squaring to -1.
// Returns (mask, sign).
std::pair<unsigned, int> blade_mul(unsigned a, unsigned b, int m) {
  int sign = 1;
  for (int i = 0; i < m; ++i) {
    unsigned bit = 1u << i;
    if (!(b & bit)) continue;
    // Move generator i from the front of b through the part of a above i.
    unsigned higher = a >> (i + 1);
    sign *= (std::popcount(higher) % 2 == 0) ? 1 : -1;
    if (a & bit) {
      sign = -sign;  // e_i e_i = -1
      a &= ~bit;
    } else {
      a |= bit;
    }
  }
  return {a, sign};
}

std::vector<int> mask_indices(unsigned mask, int m) {
  std::vector<int> idx;
  for (int i = 0; i < m; ++i)
    if (mask & (1u << i)) idx.push_back(i + 1);
  return idx;
}

}  // namespace

Algebra Algebra::clifford(int m) {
  if (m < 1 || m > 5) throw AlgebraError("clifford: m out of range [1, 5]");
  const int dim = 1 << m;
  // Blades sorted by (grade, lexicographic multi-index).
  std::vector<unsigned> order(dim);
  for (int i = 0; i < dim; ++i) order[i] = static_cast<unsigned>(i);
  std::sort(order.begin(), order.end(), [m](unsigned a, unsigned b) {
    int ga = std::popcount(a), gb = std::popcount(b);
    if (ga != gb) return ga < gb;
    return mask_indices(a, m) < mask_indices(b, m);
  });
  std::vector<int> pos(dim);
  for (int i = 0; i < dim; ++i) pos[order[i]] = i;

  std::vector<std::array<double, 4>> st;
  for (int s = 0; s < dim; ++s) {
    for (int t = 0; t < dim; ++t) {
      auto [mask, sign] = blade_mul(order[s], order[t], m);
      st.push_back({double(s), double(t), double(pos[mask]), double(sign)});
    }
  }
  std::vector<std::array<double, 3>> invo;
  std::vector<std::string> names;
  for (int s = 0; s < dim; ++s) {
    int k = std::popcount(order[s]);
    int sign = (k * (k + 1) / 2) % 2 == 0 ? 1 : -1;  // Clifford conjugation
    invo.push_back({double(s), double(s), double(sign)});
    if (k == 0) {
      names.push_back("1");
    } else {
      std::string nm = "e";
      for (int i : mask_indices(order[s], m)) nm += std::to_string(i);
      names.push_back(nm);
    }
  }
  return Algebra(dim, "clifford(0," + std::to_string(m) + ")", st, invo, names);
}

Algebra Algebra::by_name(const std::string& kind) {
  if (kind == "complex") return complex_numbers();
  if (kind == "quaternions") return quaternions();
  if (kind == "octonions") return octonions();
  if (kind.rfind("clifford", 0) == 0 && kind.size() > 8) {
    int m = std::stoi(kind.substr(8));
    return clifford(m);
  }
  throw AlgebraError("unknown algebra kind: " + kind +
                     " (expected complex|quaternions|octonions|clifford<m>)");
}

Algebra Algebra::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw AlgebraError(std::string("algebra file is not valid JSON: ") + e.what());
  }
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw AlgebraError("algebra file: missing integer field 'dim'");
  int dim = j["dim"].get<int>();
  std::string name = j.value("name", std::string("custom"));
  if (!j.contains("structure") || !j["structure"].is_array())
    throw AlgebraError("algebra file: missing array field 'structure'");
  if (!j.contains("involution") || !j["involution"].is_array())
    throw AlgebraError("algebra file: missing array field 'involution'");

  std::vector<std::array<double, 4>> st;
  for (const auto& row : j["structure"]) {
    if (!row.is_array() || row.size() != 4)
      throw AlgebraError("algebra file: each structure entry must be [s, t, u, value]");
    st.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(),
                  row[3].get<double>()});
  }
  std::vector<std::array<double, 3>> invo;
  for (const auto& row : j["involution"]) {
    if (!row.is_array() || row.size() != 3)
      throw AlgebraError("algebra file: each involution entry must be [s, s', sign]");
    invo.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
  }
  std::vector<std::string> names;
  if (j.contains("basis_names")) {
    if (!j["basis_names"].is_array())
      throw AlgebraError("algebra file: 'basis_names' must be an array of strings");
    for (const auto& nm : j["basis_names"]) names.push_back(nm.get<std::string>());
  }
  Algebra a(dim, name, st, invo, std::move(names));
  a.validate();
  return a;
}

Algebra Algebra::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AlgebraError("cannot open algebra file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return from_json_text(os.str());
}

std::string Algebra::to_json_text() const {
  nlohmann::ordered_json j;
  j["dim"] = dim_;
  j["name"] = name_;
  auto st = nlohmann::ordered_json::array();
  for (int s = 0; s < dim_; ++s)
    for (int t = 0; t < dim_; ++t)
      for (const Term& term : product_terms(s, t))
        st.push_back({s, t, term.u, term.v});
  j["structure"] = st;
  auto invo = nlohmann::ordered_json::array();
  for (int s = 0; s < dim_; ++s) invo.push_back({s, invo_perm_[s], invo_sign_[s]});
  j["involution"] = invo;
  j["basis_names"] = basis_names_;
  return j.dump(2) + "\n";
}

}  // namespace alterna
