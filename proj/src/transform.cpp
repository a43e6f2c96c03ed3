#include "ffext/transform.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ffext/errors.hpp"

namespace ffext {
namespace {

std::atomic<long long> g_grid_cap{1LL << 26};

void check_same_space(const GridFunction& a, const GridFunction& b) {
  if (!a.ctx || !b.ctx || !a.ctx->same_field(*b.ctx))
    throw std::invalid_argument("grid functions live over different fields");
  if (a.d != b.d) throw std::invalid_argument("grid dimensions differ");
  if (a.measure != b.measure)
    throw std::invalid_argument("grid measure tags differ");
}

// Applies a dense q x q kernel along every axis in turn; kernel(j, k) is the
// weight of input digit k in output digit j.
template <typename Kernel>
void apply_separable(std::vector<cplx>& v, int q, int d, Kernel kernel) {
  std::vector<cplx> in(q), out(q);
  long long stride = 1;
  for (int axis = 0; axis < d; ++axis) {
    const long long block = stride * q;
    const long long groups = static_cast<long long>(v.size()) / block;
    for (long long g = 0; g < groups; ++g) {
      for (long long inner = 0; inner < stride; ++inner) {
        const long long base = g * block + inner;
        for (int k = 0; k < q; ++k) in[k] = v[base + k * stride];
        for (int j = 0; j < q; ++j) {
          cplx acc = 0.0;
          for (int k = 0; k < q; ++k) acc += kernel(j, k) * in[k];
          out[j] = acc;
        }
        for (int j = 0; j < q; ++j) v[base + j * stride] = out[j];
      }
    }
    stride = block;
  }
}

}  // namespace

long long grid_cap() { return g_grid_cap.load(); }

void set_grid_cap(long long cap) {
  if (cap < 1) throw std::invalid_argument("grid cap must be positive");
  g_grid_cap.store(cap);
}

long long grid_size_checked(const FieldPtr& ctx, int d) {
  if (!ctx) throw std::invalid_argument("null field context");
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  const long long cap = g_grid_cap.load();
  long long n = 1;
  for (int i = 0; i < d; ++i) {
    n *= ctx->q();
    if (n > cap)
      throw resource_error("grid of q^d points exceeds the configured cap");
  }
  return n;
}

GridFunction make_grid_function(FieldPtr ctx, int d, Measure measure) {
  const long long n = grid_size_checked(ctx, d);
  return GridFunction{std::move(ctx), d, measure,
                      std::vector<cplx>(static_cast<std::size_t>(n), 0.0)};
}

long long grid_encode(const FieldPtr& ctx, const std::vector<int>& coords) {
  long long index = 0;
  for (std::size_t i = coords.size(); i-- > 0;)
    index = index * ctx->q() + coords[i];
  return index;
}

std::vector<int> grid_decode(const FieldPtr& ctx, int d, long long index) {
  std::vector<int> coords(d);
  for (int i = 0; i < d; ++i) {
    coords[i] = static_cast<int>(index % ctx->q());
    index /= ctx->q();
  }
  return coords;
}

GridFunction fourier_forward(const GridFunction& g) {
  if (g.measure != Measure::Counting)
    throw std::invalid_argument("forward transform expects a Counting input");
  const auto& f = *g.ctx;
  const int q = f.q();
  std::vector<cplx> kernel(static_cast<std::size_t>(q) * q);
  for (int j = 0; j < q; ++j)
    for (int k = 0; k < q; ++k)
      kernel[static_cast<std::size_t>(j) * q + k] =
          f.additive_character(f.neg(f.mul(k, j)));

  GridFunction out{g.ctx, g.d, Measure::Normalized, g.values};
  apply_separable(out.values, q, g.d, [&](int j, int k) {
    return kernel[static_cast<std::size_t>(j) * q + k];
  });
  return out;
}

GridFunction fourier_inverse(const GridFunction& f) {
  if (f.measure != Measure::Normalized)
    throw std::invalid_argument("inverse transform expects a Normalized input");
  const auto& fld = *f.ctx;
  const int q = fld.q();
  std::vector<cplx> kernel(static_cast<std::size_t>(q) * q);
  for (int j = 0; j < q; ++j)
    for (int k = 0; k < q; ++k)
      kernel[static_cast<std::size_t>(j) * q + k] =
          fld.additive_character(fld.mul(k, j)) / static_cast<double>(q);

  GridFunction out{f.ctx, f.d, Measure::Counting, f.values};
  apply_separable(out.values, q, f.d, [&](int j, int k) {
    return kernel[static_cast<std::size_t>(j) * q + k];
  });
  return out;
}

GridFunction convolve(const GridFunction& a, const GridFunction& b) {
  check_same_space(a, b);
  const auto& f = *a.ctx;
  const int q = f.q();
  const int d = a.d;
  const long long n = static_cast<long long>(a.values.size());

  GridFunction out{a.ctx, d, a.measure,
                   std::vector<cplx>(a.values.size(), 0.0)};

  std::vector<long long> weight(d);
  weight[0] = 1;
  for (int i = 1; i < d; ++i) weight[i] = weight[i - 1] * q;

  std::vector<int> md(d), nd(d), wd(d);
  for (long long m = 0; m < n; ++m) {
    const cplx bm = b.values[static_cast<std::size_t>(m)];
    if (bm == 0.0) continue;

    long long t = m;
    for (int i = 0; i < d; ++i) {
      md[i] = static_cast<int>(t % q);
      t /= q;
    }
    // Walk n as a base-q odometer, maintaining the flat index of n - m
    // incrementally: only digits touched by the carry chain change.
    long long w = 0;
    for (int i = 0; i < d; ++i) {
      nd[i] = 0;
      wd[i] = f.neg(md[i]);
      w += wd[i] * weight[i];
    }
    for (long long x = 0;; ++x) {
      out.values[static_cast<std::size_t>(x)] +=
          a.values[static_cast<std::size_t>(w)] * bm;
      if (x + 1 == n) break;
      for (int i = 0;; ++i) {
        ++nd[i];
        const bool carry = (nd[i] == q);
        if (carry) nd[i] = 0;
        const int nw = f.sub(nd[i], md[i]);
        w += (nw - wd[i]) * weight[i];
        wd[i] = nw;
        if (!carry) break;
      }
    }
  }

  if (a.measure == Measure::Normalized) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : out.values) v *= scale;
  }
  return out;
}

GridFunction pointwise_multiply(const GridFunction& a, const GridFunction& b) {
  check_same_space(a, b);
  GridFunction out{a.ctx, a.d, a.measure, a.values};
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= b.values[i];
  return out;
}

double lp_norm(const GridFunction& h, double p) {
  if (std::isnan(p) || p < 1.0) throw std::domain_error("exponent must be >= 1");
  if (std::isinf(p)) {
    double mx = 0.0;
    for (const auto& v : h.values) mx = std::max(mx, std::abs(v));
    return mx;
  }
  double sum = 0.0;
  if (p == 2.0) {
    for (const auto& v : h.values) sum += std::norm(v);
  } else if (p == 1.0) {
    for (const auto& v : h.values) sum += std::abs(v);
  } else {
    for (const auto& v : h.values) sum += std::pow(std::abs(v), p);
  }
  if (h.measure == Measure::Normalized)
    sum /= static_cast<double>(h.values.size());
  return (p == 2.0) ? std::sqrt(sum) : std::pow(sum, 1.0 / p);
}

cplx grid_inner(const GridFunction& a, const GridFunction& b) {
  check_same_space(a, b);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    acc += a.values[i] * std::conj(b.values[i]);
  if (a.measure == Measure::Normalized)
    acc /= static_cast<double>(a.values.size());
  return acc;
}

}  // namespace ffext
