#include "ffext/field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ffext/errors.hpp"

namespace ffext {
namespace {

constexpr int kMaxQ = 1024;  // dense q*q tables stay small at desk scale

bool is_odd_prime(int p) {
  if (p < 3 || p % 2 == 0) return false;
  for (int f = 3; f * f <= p; f += 2)
    if (p % f == 0) return false;
  return true;
}

using Poly = std::vector<int>;  // coefficients mod p, constant term first

int degree(const Poly& a) {
  for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i)
    if (a[i] != 0) return i;
  return -1;
}

Poly poly_mul(const Poly& a, const Poly& b, int p) {
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      out[i + j] = (out[i + j] + a[i] * b[j]) % p;
  }
  return out;
}

// Remainder of a by a monic divisor m.
Poly poly_rem(Poly a, const Poly& m, int p) {
  const int dm = degree(m);
  for (int da = degree(a); da >= dm; da = degree(a)) {
    const int c = a[da];
    if (c != 0) {
      for (int i = 0; i <= dm; ++i) {
        int& t = a[da - dm + i];
        t = ((t - c * m[i]) % p + p) % p;
      }
    }
    a.resize(da);
    if (a.empty()) break;
  }
  return a;
}

bool is_irreducible(const Poly& m, int p) {
  const int n = degree(m);
  if (n < 1) return false;
  // Trial division by every monic polynomial of degree 1..n/2.
  for (int k = 1; 2 * k <= n; ++k) {
    long long count = 1;
    for (int i = 0; i < k; ++i) count *= p;
    for (long long c = 0; c < count; ++c) {
      Poly div(k + 1, 0);
      long long t = c;
      for (int i = 0; i < k; ++i) {
        div[i] = static_cast<int>(t % p);
        t /= p;
      }
      div[k] = 1;
      if (degree(poly_rem(m, div, p)) < 0) return false;
    }
  }
  return true;
}

Poly find_irreducible(int p, int n) {
  long long count = 1;
  for (int i = 0; i < n; ++i) count *= p;
  for (long long c = 0; c < count; ++c) {
    Poly m(n + 1, 0);
    long long t = c;
    for (int i = 0; i < n; ++i) {
      m[i] = static_cast<int>(t % p);
      t /= p;
    }
    m[n] = 1;
    if (is_irreducible(m, p)) return m;
  }
  throw consistency_error("no irreducible modulus found");  // unreachable
}

Poly decode(int index, int p, int n) {
  Poly digits(n, 0);
  for (int i = 0; i < n; ++i) {
    digits[i] = index % p;
    index /= p;
  }
  return digits;
}

int encode(const Poly& digits, int p, int n) {
  int index = 0;
  for (int i = n - 1; i >= 0; --i)
    index = index * p + (i < static_cast<int>(digits.size()) ? digits[i] : 0);
  return index;
}

}  // namespace

FieldContext::FieldContext(int p, int n, std::vector<int> modulus)
    : p_(p), n_(n), modulus_(std::move(modulus)) {
  if (!is_odd_prime(p_)) throw std::invalid_argument("p must be an odd prime");
  if (n_ < 1) throw std::invalid_argument("extension degree must be >= 1");

  long long q = 1;
  for (int i = 0; i < n_; ++i) {
    q *= p_;
    if (q > kMaxQ) throw resource_error("field size exceeds desk-scale limit");
  }
  q_ = static_cast<int>(q);

  if (n_ == 1) {
    if (!modulus_.empty())
      throw std::invalid_argument("prime field takes an empty modulus");
  } else {
    if (static_cast<int>(modulus_.size()) != n_ + 1)
      throw std::invalid_argument("modulus must have degree n");
    if (modulus_[n_] != 1) throw std::invalid_argument("modulus must be monic");
    for (int c : modulus_)
      if (c < 0 || c >= p_)
        throw std::invalid_argument("modulus coefficients must lie in [0, p)");
    if (!is_irreducible(modulus_, p_))
      throw std::invalid_argument("modulus is reducible over F_p");
  }

  const std::size_t qq = static_cast<std::size_t>(q_) * q_;
  add_.resize(qq);
  mul_.resize(qq);
  neg_.resize(q_);
  inv_.assign(q_, 0);
  trace_.resize(q_);
  quad_.resize(q_);
  chi_.resize(q_);

  for (int a = 0; a < q_; ++a) {
    const Poly da = decode(a, p_, n_);
    Poly nd(n_);
    for (int i = 0; i < n_; ++i) nd[i] = (p_ - da[i]) % p_;
    neg_[a] = encode(nd, p_, n_);
    for (int b = 0; b <= a; ++b) {
      const Poly db = decode(b, p_, n_);
      Poly s(n_);
      for (int i = 0; i < n_; ++i) s[i] = (da[i] + db[i]) % p_;
      const int sum = encode(s, p_, n_);
      add_[static_cast<std::size_t>(a) * q_ + b] = sum;
      add_[static_cast<std::size_t>(b) * q_ + a] = sum;

      Poly m = poly_mul(da, db, p_);
      if (n_ > 1) m = poly_rem(std::move(m), modulus_, p_);
      const int prod = encode(m, p_, n_);
      mul_[static_cast<std::size_t>(a) * q_ + b] = prod;
      mul_[static_cast<std::size_t>(b) * q_ + a] = prod;
    }
  }

  for (int a = 1; a < q_; ++a) inv_[a] = pow(a, q_ - 2);

  for (int a = 0; a < q_; ++a) {
    int t = a;
    int acc = a;
    for (int i = 1; i < n_; ++i) {
      t = pow(t, p_);
      acc = add(acc, t);
    }
    if (acc >= p_) throw consistency_error("trace left the prime subfield");
    trace_[a] = acc;
    chi_[a] = std::polar(1.0, 2.0 * std::numbers::pi * trace_[a] / p_);
  }

  quad_[0] = 0;
  for (int a = 1; a < q_; ++a) {
    const int e = pow(a, (q_ - 1) / 2);
    if (e == 1)
      quad_[a] = 1;
    else if (e == neg_[1])
      quad_[a] = -1;
    else
      throw consistency_error("a^((q-1)/2) is not a square root of 1");
  }

  gauss_ = 0.0;
  for (int s = 1; s < q_; ++s)
    gauss_ += static_cast<double>(quad_[s]) * chi_[s];
}

int FieldContext::inv(int a) const {
  if (a == 0) throw std::domain_error("inverse of zero");
  return inv_[a];
}

int FieldContext::pow(int a, long long e) const {
  if (e < 0) return pow(inv(a), -e);
  int base = a;
  int acc = 1;
  while (e > 0) {
    if (e & 1) acc = mul(acc, base);
    base = mul(base, base);
    e >>= 1;
  }
  return acc;
}

int FieldContext::from_int(long long k) const {
  return static_cast<int>(((k % p_) + p_) % p_);
}

std::shared_ptr<const FieldContext> FieldContext::make(int p, int n) {
  if (n < 1) throw std::invalid_argument("extension degree must be >= 1");
  if (!is_odd_prime(p)) throw std::invalid_argument("p must be an odd prime");
  std::vector<int> modulus;
  if (n > 1) modulus = find_irreducible(p, n);
  return std::shared_ptr<const FieldContext>(
      new FieldContext(p, n, std::move(modulus)));
}

std::shared_ptr<const FieldContext> FieldContext::make(int p, int n,
                                                       std::vector<int> modulus) {
  return std::shared_ptr<const FieldContext>(
      new FieldContext(p, n, std::move(modulus)));
}

}  // namespace ffext
