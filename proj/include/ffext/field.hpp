#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace ffext {

using cplx = std::complex<double>;

// Arithmetic context for F_q, q = p^n with p an odd prime. Elements are
// integer indices in [0, q): the base-p digits of an index are the
// coefficients of the element in the power basis 1, t, t^2, ... of the
// quotient ring F_p[t]/(modulus). All arithmetic is table-backed.
class FieldContext {
 public:
  // Builds F_{p^n} with the lexicographically smallest monic irreducible
  // modulus (ignored for n == 1).
  static std::shared_ptr<const FieldContext> make(int p, int n = 1);

  // Builds F_{p^n} with an explicit monic irreducible modulus, given as
  // n + 1 coefficients in [0, p), constant term first. Must be empty when
  // n == 1.
  static std::shared_ptr<const FieldContext> make(int p, int n,
                                                  std::vector<int> modulus);

  int p() const { return p_; }
  int n() const { return n_; }
  int q() const { return q_; }
  const std::vector<int>& modulus() const { return modulus_; }

  int add(int a, int b) const { return add_[static_cast<std::size_t>(a) * q_ + b]; }
  int sub(int a, int b) const { return add(a, neg_[b]); }
  int neg(int a) const { return neg_[a]; }
  int mul(int a, int b) const { return mul_[static_cast<std::size_t>(a) * q_ + b]; }
  int inv(int a) const;                // throws std::domain_error on 0
  int pow(int a, long long e) const;   // negative e inverts first
  int from_int(long long k) const;     // image of an integer in the prime subfield

  // Absolute trace down to F_p, returned as an index in [0, p).
  int trace(int a) const { return trace_[a]; }

  // Canonical additive character exp(2*pi*i*trace(a)/p).
  cplx additive_character(int a) const { return chi_[a]; }

  // Quadratic character: +1 on nonzero squares, -1 on nonsquares, 0 at 0.
  int quadratic_character(int a) const { return quad_[a]; }

  // Quadratic Gauss sum sum_{s != 0} quadratic_character(s) * additive_character(s).
  cplx gauss_sum() const { return gauss_; }

  bool is_minus_one_square() const { return quad_[neg_[1]] == 1; }

  bool same_field(const FieldContext& other) const {
    return p_ == other.p_ && n_ == other.n_ && modulus_ == other.modulus_;
  }

 private:
  FieldContext(int p, int n, std::vector<int> modulus);

  int p_;
  int n_;
  int q_;
  std::vector<int> modulus_;
  std::vector<int> add_;
  std::vector<int> mul_;
  std::vector<int> neg_;
  std::vector<int> inv_;
  std::vector<int> trace_;
  std::vector<int> quad_;
  std::vector<cplx> chi_;
  cplx gauss_;
};

using FieldPtr = std::shared_ptr<const FieldContext>;

}  // namespace ffext
