#pragma once

// Exact rational-function arithmetic over Q and the linear solve that turns a
// finished grammar tree into the weight-enumerator of its language: one
// unknown z[w1,w2] per vertex, one equation per vertex, eliminated exactly.

#include <gmpxx.h>

#include <string>
#include <vector>

#include "lingram/discovery.hpp"
#include "lingram/errors.hpp"

namespace lingram {

struct PolyDivMod;

// Dense polynomial in x over exact rationals. Canonical: no trailing zero
// coefficients; the zero polynomial has an empty coefficient vector.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<mpq_class> coeffs);
  Polynomial(long constant);  // NOLINT: implicit by design, mirrors literals

  static Polynomial monomial(int degree, const mpq_class& coeff = 1);

  const std::vector<mpq_class>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const mpq_class& leading() const;
  mpq_class at(int degree) const;  // 0 beyond the stored range

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) = default;

  Polynomial operator-() const;

  // Euclidean division; remainder has smaller degree than the divisor.
  PolyDivMod divmod(const Polynomial& divisor) const;

 private:
  void trim();
  std::vector<mpq_class> coeffs_;
};

struct PolyDivMod {
  Polynomial quotient, remainder;
};

// Monic gcd via the Euclidean algorithm; gcd(0, 0) = 0.
Polynomial poly_gcd(Polynomial a, Polynomial b);

std::string to_string(const Polynomial& p);

// Quotient of polynomials in canonical form: gcd-reduced, scaled so both
// parts have integer coefficients with joint content 1, and the denominator's
// lowest-order nonzero coefficient is positive. Canonical forms are unique,
// so equality is field equality.
class RationalFunction {
 public:
  RationalFunction() : num_(), den_(1) {}
  RationalFunction(Polynomial numerator, Polynomial denominator);
  RationalFunction(long constant) : RationalFunction(Polynomial(constant), 1) {}

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  friend RationalFunction operator+(const RationalFunction& a,
                                    const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a,
                                    const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a,
                                    const RationalFunction& b);
  // Throws DivisionByZeroError on a zero divisor.
  friend RationalFunction operator/(const RationalFunction& a,
                                    const RationalFunction& b);
  friend bool operator==(const RationalFunction& a,
                         const RationalFunction& b) = default;

 private:
  Polynomial num_, den_;
};

// Compact ascending-degree form: `1/(1-10*x^5)`, `(1+x)/(1-x)`, `x^2`, `0`.
std::string to_string(const RationalFunction& f);

// One linear equation per vertex: z[var] = constant + sum coeff * z[term var],
// where every coefficient is a monomial in x.
struct GfEquation {
  struct Term {
    Polynomial coeff;
    int var;
  };
  int var = -1;
  std::vector<Term> terms;
  Polynomial constant;
};

struct GfSystem {
  int vertex_count = 0;
  std::vector<GfEquation> equations;  // equations[i].var == i
};

// Emits the equation shaped by each vertex kind: internal vertices sum their
// children plus x^context_len when the bare context itself is a good word;
// empty leaves pin z = 0; clone leaves defer to x^delta_len times the target.
// Throws MalformedTreeError when the tree has undecided vertices.
GfSystem build_gf_system(const GrammarTree& tree);

// Exact elimination; index i holds z of vertex i. Throws SingularSystemError
// if the system does not determine a unique solution (malformed input — a
// well-formed tree system is always solvable).
std::vector<RationalFunction> solve_gf_system(const GfSystem& system);

// First order+1 Taylor coefficients of f at x = 0, exact. Throws
// PoleAtZeroError when the denominator vanishes at 0.
std::vector<mpq_class> series_coefficients(const RationalFunction& f,
                                           int order);

}  // namespace lingram
