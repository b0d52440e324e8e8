#include "lingram/gfsolve.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

namespace lingram {

Polynomial::Polynomial(std::vector<mpq_class> coeffs)
    : coeffs_(std::move(coeffs)) {
  trim();
}

Polynomial::Polynomial(long constant) {
  if (constant != 0) coeffs_.push_back(mpq_class(constant));
}

Polynomial Polynomial::monomial(int degree, const mpq_class& coeff) {
  if (coeff == 0) return {};
  std::vector<mpq_class> c(static_cast<std::size_t>(degree) + 1, 0);
  c.back() = coeff;
  return Polynomial(std::move(c));
}

const mpq_class& Polynomial::leading() const {
  static const mpq_class zero = 0;
  return coeffs_.empty() ? zero : coeffs_.back();
}

mpq_class Polynomial::at(int degree) const {
  if (degree < 0 || degree >= static_cast<int>(coeffs_.size())) return 0;
  return coeffs_[static_cast<std::size_t>(degree)];
}

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<mpq_class> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  return a + (-b);
}

Polynomial Polynomial::operator-() const {
  std::vector<mpq_class> c = coeffs_;
  for (auto& q : c) q = -q;
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<mpq_class> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
      c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(c));
}

PolyDivMod Polynomial::divmod(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw DivisionByZeroError("polynomial division by zero");
  Polynomial rem = *this;
  if (rem.degree() < divisor.degree()) return {{}, rem};
  std::vector<mpq_class> quot(
      static_cast<std::size_t>(rem.degree() - divisor.degree()) + 1, 0);
  while (!rem.is_zero() && rem.degree() >= divisor.degree()) {
    int shift = rem.degree() - divisor.degree();
    mpq_class factor = rem.leading() / divisor.leading();
    quot[static_cast<std::size_t>(shift)] = factor;
    rem = rem - Polynomial::monomial(shift, factor) * divisor;
  }
  return {Polynomial(std::move(quot)), rem};
}

Polynomial poly_gcd(Polynomial a, Polynomial b) {
  while (!b.is_zero()) {
    Polynomial r = a.divmod(b).remainder;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  // monic normalization makes the gcd unique
  mpq_class inv_lead = 1 / a.leading();
  return a * Polynomial::monomial(0, inv_lead);
}

std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (int k = 0; k <= p.degree(); ++k) {
    mpq_class c = p.at(k);
    if (c == 0) continue;
    bool negative = c < 0;
    mpq_class mag = negative ? mpq_class(-c) : c;
    std::string term;
    if (k == 0) {
      term = mag.get_str();
    } else {
      std::string xpart = k == 1 ? "x" : "x^" + std::to_string(k);
      term = mag == 1 ? xpart : mag.get_str() + "*" + xpart;
    }
    if (out.empty())
      out = negative ? "-" + term : term;
    else
      out += (negative ? "-" : "+") + term;
  }
  return out;
}

namespace {

int nonzero_terms(const Polynomial& p) {
  int n = 0;
  for (const auto& c : p.coeffs())
    if (c != 0) ++n;
  return n;
}

}  // namespace

RationalFunction::RationalFunction(Polynomial numerator,
                                   Polynomial denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  if (den_.is_zero())
    throw DivisionByZeroError("rational function with zero denominator");
  if (num_.is_zero()) {
    den_ = Polynomial(1);
    return;
  }
  Polynomial g = poly_gcd(num_, den_);
  if (g.degree() > 0) {
    num_ = num_.divmod(g).quotient;
    den_ = den_.divmod(g).quotient;
  }
  // Scale to integer coefficients with joint content 1.
  mpz_class lcm_den = 1;
  for (const Polynomial* p : {&num_, &den_})
    for (const auto& c : p->coeffs())
      mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(),
              c.get_den().get_mpz_t());
  mpz_class content = 0;
  auto scaled = [&](const Polynomial& p) {
    std::vector<mpq_class> c = p.coeffs();
    for (auto& q : c) {
      q *= lcm_den;
      q.canonicalize();
      mpz_gcd(content.get_mpz_t(), content.get_mpz_t(),
              q.get_num().get_mpz_t());
    }
    return c;
  };
  std::vector<mpq_class> ncoeffs = scaled(num_);
  std::vector<mpq_class> dcoeffs = scaled(den_);
  for (auto* v : {&ncoeffs, &dcoeffs})
    for (auto& q : *v) {
      q /= content;
      q.canonicalize();
    }
  num_ = Polynomial(std::move(ncoeffs));
  den_ = Polynomial(std::move(dcoeffs));
  // Fix the sign via the denominator's lowest-order nonzero coefficient.
  for (const auto& c : den_.coeffs()) {
    if (c == 0) continue;
    if (c < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    break;
  }
}

RationalFunction operator+(const RationalFunction& a,
                           const RationalFunction& b) {
  return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

RationalFunction operator-(const RationalFunction& a,
                           const RationalFunction& b) {
  return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
}

RationalFunction operator*(const RationalFunction& a,
                           const RationalFunction& b) {
  return {a.num_ * b.num_, a.den_ * b.den_};
}

RationalFunction operator/(const RationalFunction& a,
                           const RationalFunction& b) {
  if (b.is_zero()) throw DivisionByZeroError("division by the zero function");
  return {a.num_ * b.den_, a.den_ * b.num_};
}

std::string to_string(const RationalFunction& f) {
  std::string num = to_string(f.numerator());
  if (f.denominator() == Polynomial(1)) return num;
  if (nonzero_terms(f.numerator()) > 1) num = "(" + num + ")";
  std::string den = to_string(f.denominator());
  if (nonzero_terms(f.denominator()) > 1) den = "(" + den + ")";
  return num + "/" + den;
}

GfSystem build_gf_system(const GrammarTree& tree) {
  GfSystem sys;
  sys.vertex_count = static_cast<int>(tree.vertices.size());
  for (const Vertex& v : tree.vertices) {
    GfEquation eq;
    eq.var = v.id;
    switch (v.kind) {
      case VertexKind::internal:
        eq.terms.push_back({Polynomial(1), v.left});
        eq.terms.push_back({Polynomial(1), v.right});
        if (v.singleton)
          eq.constant = Polynomial::monomial(v.context_len());
        break;
      case VertexKind::empty_leaf:
        break;  // z = 0
      case VertexKind::clone_leaf:
        eq.terms.push_back({Polynomial::monomial(v.delta_len), v.target});
        break;
      case VertexKind::undecided:
        throw MalformedTreeError("vertex " + std::to_string(v.id) +
                                 " is undecided; the tree is not finished");
    }
    sys.equations.push_back(std::move(eq));
  }
  return sys;
}

namespace {

// Affine form over not-yet-eliminated unknowns.
struct Expr {
  RationalFunction constant;
  std::map<int, RationalFunction> lin;
};

}  // namespace

std::vector<RationalFunction> solve_gf_system(const GfSystem& system) {
  const int n = system.vertex_count;
  if (static_cast<int>(system.equations.size()) != n)
    throw SingularSystemError("equation count does not match unknown count");
  for (int i = 0; i < n; ++i)
    if (system.equations[static_cast<std::size_t>(i)].var != i)
      throw SingularSystemError("equations are not indexed by vertex id");

  // Eliminate from the highest id down, keeping every stored expression in
  // terms of strictly lower ids only; tree children point upward and clone
  // targets point downward, so substitution always makes progress.
  std::vector<std::optional<Expr>> exprs(static_cast<std::size_t>(n));
  for (int id = n - 1; id >= 0; --id) {
    const GfEquation& eq = system.equations[static_cast<std::size_t>(id)];
    Expr e;
    e.constant = RationalFunction(eq.constant, Polynomial(1));
    for (const GfEquation::Term& t : eq.terms) {
      if (t.var < 0 || t.var >= n)
        throw SingularSystemError("equation references unknown vertex " +
                                  std::to_string(t.var));
      RationalFunction coeff(t.coeff, Polynomial(1));
      auto [it, fresh] = e.lin.emplace(t.var, coeff);
      if (!fresh) it->second = it->second + coeff;
    }
    // Substitute away references to already-eliminated (higher) ids.
    while (true) {
      auto it = e.lin.rbegin();
      if (it == e.lin.rend() || it->first <= id) break;
      int var = it->first;
      RationalFunction coeff = it->second;
      e.lin.erase(var);
      const Expr& sub = *exprs[static_cast<std::size_t>(var)];
      e.constant = e.constant + coeff * sub.constant;
      for (const auto& [v2, c2] : sub.lin) {
        RationalFunction add = coeff * c2;
        auto [jt, fresh] = e.lin.emplace(v2, add);
        if (!fresh) jt->second = jt->second + add;
      }
    }
    // Self-reference: z = m z + rest  =>  z = rest / (1 - m).
    auto self = e.lin.find(id);
    if (self != e.lin.end()) {
      RationalFunction m = self->second;
      e.lin.erase(self);
      RationalFunction denom = RationalFunction(1) - m;
      if (denom.is_zero())
        throw SingularSystemError("vertex " + std::to_string(id) +
                                  " has no unique solution");
      e.constant = e.constant / denom;
      for (auto& [v2, c2] : e.lin) c2 = c2 / denom;
    }
    exprs[static_cast<std::size_t>(id)] = std::move(e);
  }

  std::vector<RationalFunction> values(static_cast<std::size_t>(n));
  for (int id = 0; id < n; ++id) {
    const Expr& e = *exprs[static_cast<std::size_t>(id)];
    RationalFunction v = e.constant;
    for (const auto& [var, coeff] : e.lin) {
      if (var >= id)
        throw SingularSystemError("elimination left a forward reference");
      v = v + coeff * values[static_cast<std::size_t>(var)];
    }
    values[static_cast<std::size_t>(id)] = std::move(v);
  }
  return values;
}

std::vector<mpq_class> series_coefficients(const RationalFunction& f,
                                           int order) {
  const Polynomial& den = f.denominator();
  mpq_class d0 = den.at(0);
  if (d0 == 0)
    throw PoleAtZeroError("denominator vanishes at 0: " + to_string(den));
  std::vector<mpq_class> c(static_cast<std::size_t>(order) + 1, 0);
  for (int m = 0; m <= order; ++m) {
    mpq_class acc = f.numerator().at(m);
    for (int k = 1; k <= std::min(m, den.degree()); ++k)
      acc -= den.at(k) * c[static_cast<std::size_t>(m - k)];
    c[static_cast<std::size_t>(m)] = acc / d0;
  }
  return c;
}

}  // namespace lingram
