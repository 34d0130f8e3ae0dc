#include "humo/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "humo/core/error.hpp"

namespace humo::nn {

namespace {

using MatMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstMatMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

ConstMatMap cmap(const Tensor& t, std::size_t rows, std::size_t cols, std::size_t offset = 0) {
  return ConstMatMap(t.data() + offset, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

MatMap map(Tensor& t, std::size_t rows, std::size_t cols, std::size_t offset = 0) {
  return MatMap(t.data() + offset, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void check_broadcast(const char* op, const Shape& a, const Shape& b) {
  if (shape_size(b) == 1) return;
  bool ok = b.size() <= a.size();
  for (std::size_t i = 0; ok && i < b.size(); ++i) ok = b[b.size() - 1 - i] == a[a.size() - 1 - i];
  if (!ok) throw DimensionError(std::string(op) + ": cannot broadcast " + shape_str(b) + " onto " + shape_str(a));
}

std::size_t last_dim(const Shape& s) { return s.empty() ? 1 : s.back(); }

Tensor im2col(const Tensor& xv, const std::vector<long>& src, std::size_t B, std::size_t T, std::size_t Cin,
              std::size_t K, std::size_t To) {
  Tensor cols(Shape{B * To, K * Cin}, 0.0);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < To; ++t)
      for (std::size_t k = 0; k < K; ++k) {
        const long s = src[t * K + k];
        if (s < 0) continue;
        std::copy_n(xv.data() + (b * T + static_cast<std::size_t>(s)) * Cin, Cin, cols.data() + (b * To + t) * K * Cin + k * Cin);
      }
  return cols;
}

std::vector<std::size_t> strides_of(const Shape& s) {
  std::vector<std::size_t> st(s.size(), 1);
  for (std::size_t i = s.size(); i-- > 1;) st[i - 1] = st[i] * s[i];
  return st;
}

}  // namespace

Var add(Var a, Var b) {
  check_broadcast("add", a.shape(), b.shape());
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Tensor out = av;
  const std::size_t nb = bv.size();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i % nb];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib, nb](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    if (Tensor* ga = t.grad_buffer(ia))
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
    if (Tensor* gb = t.grad_buffer(ib))
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i % nb] += g[i];
  });
}

Var sub(Var a, Var b) {
  check_broadcast("sub", a.shape(), b.shape());
  const Tensor& bv = b.value();
  Tensor out = a.value();
  const std::size_t nb = bv.size();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i % nb];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib, nb](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    if (Tensor* ga = t.grad_buffer(ia))
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
    if (Tensor* gb = t.grad_buffer(ib))
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i % nb] -= g[i];
  });
}

Var mul(Var a, Var b) {
  check_broadcast("mul", a.shape(), b.shape());
  const Tensor& bv = b.value();
  Tensor out = a.value();
  const std::size_t nb = bv.size();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i % nb];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib, nb](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& av = t.value(ia);
    const Tensor& bv = t.value(ib);
    if (Tensor* ga = t.grad_buffer(ia))
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * bv[i % nb];
    if (Tensor* gb = t.grad_buffer(ib))
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i % nb] += g[i] * av[i];
  });
}

Var scale(Var a, double s) {
  Tensor out = a.value();
  for (double& x : out.values()) x *= s;
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, s](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor* ga = t.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += s * g[i];
  });
}

Var relu(Var x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& xv = t.value(ix);
    Tensor* gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (xv[i] > 0.0) (*gx)[i] += g[i];
  });
}

Var sigmoid(Var x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor* gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var exp(Var x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = std::exp(v);
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor* gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i] * y[i];
  });
}

Var square(Var x) {
  Tensor out = x.value();
  for (double& v : out.values()) v *= v;
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& xv = t.value(ix);
    Tensor* gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += 2.0 * xv[i] * g[i];
  });
}

Var sum(Var x) {
  double s = 0.0;
  for (double v : x.value().values()) s += v;
  const std::size_t ix = x.id();
  return x.tape().record(Tensor::scalar(s), {x}, [ix](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    Tensor* gx = t.grad_buffer(ix);
    for (double& v : gx->values()) v += g;
  });
}

Var mean(Var x) {
  const std::size_t n = x.value().size();
  if (n == 0) throw DimensionError("mean of empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(n));
}

Var mean_axis(Var x, std::size_t axis) {
  const Shape& s = x.shape();
  if (axis >= s.size()) throw DimensionError("mean_axis: axis out of range for " + shape_str(s));
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t len = s[axis];
  Shape os = s;
  os.erase(os.begin() + static_cast<std::ptrdiff_t>(axis));
  Tensor out(os, 0.0);
  const Tensor& xv = x.value();
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t l = 0; l < len; ++l)
      for (std::size_t i = 0; i < inner; ++i) out[o * inner + i] += xv[(o * len + l) * inner + i] / static_cast<double>(len);
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix, outer, inner, len](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor* gx = t.grad_buffer(ix);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t l = 0; l < len; ++l)
        for (std::size_t i = 0; i < inner; ++i) (*gx)[(o * len + l) * inner + i] += g[o * inner + i] / static_cast<double>(len);
  });
}

Var matmul(Var a, Var b) {
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  if (as.empty() || bs.size() != 2 || as.back() != bs[0]) {
    throw DimensionError("matmul: incompatible shapes " + shape_str(as) + " x " + shape_str(bs));
  }
  const std::size_t k = bs[0], n = bs[1], m = a.value().size() / k;
  Shape os = as;
  os.back() = n;
  Tensor out(os);
  map(out, m, n).noalias() = cmap(a.value(), m, k) * cmap(b.value(), k, n);
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib, m, k, n](Tape& t, std::size_t self) {
    const auto g = cmap(t.grad(self), m, n);
    if (Tensor* ga = t.grad_buffer(ia)) map(*ga, m, k).noalias() += g * cmap(t.value(ib), k, n).transpose();
    if (Tensor* gb = t.grad_buffer(ib)) map(*gb, k, n).noalias() += cmap(t.value(ia), m, k).transpose() * g;
  });
}

Var bmm(Var a, Var b) {
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  if (as.size() != 3 || bs.size() != 3 || as[0] != bs[0] || as[2] != bs[1]) {
    throw DimensionError("bmm: incompatible shapes " + shape_str(as) + " x " + shape_str(bs));
  }
  const std::size_t B = as[0], m = as[1], k = as[2], n = bs[2];
  Tensor out(Shape{B, m, n});
  for (std::size_t i = 0; i < B; ++i)
    map(out, m, n, i * m * n).noalias() = cmap(a.value(), m, k, i * m * k) * cmap(b.value(), k, n, i * k * n);
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib, B, m, k, n](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor* ga = t.grad_buffer(ia);
    Tensor* gb = t.grad_buffer(ib);
    for (std::size_t i = 0; i < B; ++i) {
      const auto gi = cmap(g, m, n, i * m * n);
      if (ga) map(*ga, m, k, i * m * k).noalias() += gi * cmap(t.value(ib), k, n, i * k * n).transpose();
      if (gb) map(*gb, k, n, i * k * n).noalias() += cmap(t.value(ia), m, k, i * m * k).transpose() * gi;
    }
  });
}

Var reshape(Var x, Shape shape) {
  Tensor out = x.value().reshaped(std::move(shape));
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor* gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i];
  });
}

Var permute(Var x, const std::vector<std::size_t>& axes) {
  const Shape& s = x.shape();
  if (axes.size() != s.size()) throw DimensionError("permute: axis count mismatch for " + shape_str(s));
  std::vector<bool> seen(s.size(), false);
  Shape os(s.size());
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i] >= s.size() || seen[axes[i]]) throw DimensionError("permute: invalid axis list");
    seen[axes[i]] = true;
    os[i] = s[axes[i]];
  }
  const auto in_strides = strides_of(s);
  // Source offset for every destination element, in destination order.
  std::vector<std::size_t> src(x.value().size());
  std::vector<std::size_t> idx(os.size(), 0);
  for (std::size_t flat = 0; flat < src.size(); ++flat) {
    std::size_t off = 0;
    for (std::size_t d = 0; d < os.size(); ++d) off += idx[d] * in_strides[axes[d]];
    src[flat] = off;
    for (std::size_t d = os.size(); d-- > 0;) {
      if (++idx[d] < os[d]) break;
      idx[d] = 0;
    }
  }
  Tensor out(os);
  const Tensor& xv = x.value();
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = xv[src[i]];
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix, src = std::move(src)](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor* gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < src.size(); ++i) (*gx)[src[i]] += g[i];
  });
}

Var slice(Var x, std::size_t axis, std::size_t begin, std::size_t end) {
  const Shape& s = x.shape();
  if (axis >= s.size() || begin > end || end > s[axis]) {
    throw DimensionError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) + ") invalid for " +
                         shape_str(s) + " axis " + std::to_string(axis));
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t len = s[axis], span = end - begin;
  Shape os = s;
  os[axis] = span;
  Tensor out(os);
  const Tensor& xv = x.value();
  for (std::size_t o = 0; o < outer; ++o)
    std::copy_n(xv.data() + (o * len + begin) * inner, span * inner, out.data() + o * span * inner);
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix, outer, inner, len, begin, span](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor* gx = t.grad_buffer(ix);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < span * inner; ++i) (*gx)[(o * len + begin) * inner + i] += g[o * span * inner + i];
  });
}

Var concat(const std::vector<Var>& parts, std::size_t axis) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  const Shape& s0 = parts[0].shape();
  if (axis >= s0.size()) throw DimensionError("concat: axis out of range");
  std::size_t outer = 1, inner = 1, total = 0;
  for (std::size_t i = 0; i < axis; ++i) outer *= s0[i];
  for (std::size_t i = axis + 1; i < s0.size(); ++i) inner *= s0[i];
  std::vector<std::size_t> lens;
  for (const Var& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == s0.size();
    for (std::size_t i = 0; ok && i < s.size(); ++i) ok = i == axis || s[i] == s0[i];
    if (!ok) throw DimensionError("concat: shape " + shape_str(s) + " incompatible with " + shape_str(s0));
    lens.push_back(s[axis]);
    total += s[axis];
  }
  Shape os = s0;
  os[axis] = total;
  Tensor out(os);
  std::size_t at = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const Tensor& v = parts[p].value();
    for (std::size_t o = 0; o < outer; ++o)
      std::copy_n(v.data() + o * lens[p] * inner, lens[p] * inner, out.data() + (o * total + at) * inner);
    at += lens[p];
  }
  std::vector<std::size_t> ids;
  for (const Var& p : parts) ids.push_back(p.id());
  return parts[0].tape().record(std::move(out), parts, [ids, lens, outer, inner, total](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    std::size_t at = 0;
    for (std::size_t p = 0; p < ids.size(); ++p) {
      if (Tensor* gp = t.grad_buffer(ids[p])) {
        for (std::size_t o = 0; o < outer; ++o)
          for (std::size_t i = 0; i < lens[p] * inner; ++i)
            (*gp)[o * lens[p] * inner + i] += g[(o * total + at) * inner + i];
      }
      at += lens[p];
    }
  });
}

Var detach(Var x) { return x.tape().constant(x.value()); }

Var straight_through(Var x, Tensor value) {
  if (value.shape() != x.shape()) {
    throw DimensionError("straight_through: " + shape_str(value.shape()) + " vs " + shape_str(x.shape()));
  }
  const std::size_t ix = x.id();
  return x.tape().record(std::move(value), {x}, [ix](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor* gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i];
  });
}

Var softmax(Var x) {
  const std::size_t n = last_dim(x.shape());
  const std::size_t rows = x.value().size() / n;
  Tensor out = x.value();
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = out.data() + r * n;
    const double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += (row[i] = std::exp(row[i] - mx));
    for (std::size_t i = 0; i < n; ++i) row[i] /= z;
  }
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix, n, rows](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor* gx = t.grad_buffer(ix);
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += g[r * n + i] * y[r * n + i];
      for (std::size_t i = 0; i < n; ++i) (*gx)[r * n + i] += y[r * n + i] * (g[r * n + i] - dot);
    }
  });
}

Var rmsnorm(Var x, Var gain, double eps) {
  const std::size_t n = last_dim(x.shape());
  if (gain.value().size() != n) {
    throw DimensionError("rmsnorm: gain " + shape_str(gain.shape()) + " does not match " + shape_str(x.shape()));
  }
  const std::size_t rows = x.value().size() / n;
  const Tensor& xv = x.value();
  const Tensor& gv = gain.value();
  Tensor out(x.shape());
  std::vector<double> inv_rms(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double ms = 0.0;
    for (std::size_t i = 0; i < n; ++i) ms += xv[r * n + i] * xv[r * n + i];
    inv_rms[r] = 1.0 / std::sqrt(ms / static_cast<double>(n) + eps);
    for (std::size_t i = 0; i < n; ++i) out[r * n + i] = xv[r * n + i] * inv_rms[r] * gv[i];
  }
  const std::size_t ix = x.id(), ig = gain.id();
  return x.tape().record(std::move(out), {x, gain}, [ix, ig, n, rows, inv_rms = std::move(inv_rms)](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& xv = t.value(ix);
    const Tensor& gv = t.value(ig);
    Tensor* gx = t.grad_buffer(ix);
    Tensor* gg = t.grad_buffer(ig);
    for (std::size_t r = 0; r < rows; ++r) {
      const double s = inv_rms[r];
      if (gx) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += g[r * n + i] * gv[i] * xv[r * n + i];
        const double c = dot * s * s * s / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) (*gx)[r * n + i] += g[r * n + i] * gv[i] * s - xv[r * n + i] * c;
      }
      if (gg)
        for (std::size_t i = 0; i < n; ++i) (*gg)[i] += g[r * n + i] * xv[r * n + i] * s;
    }
  });
}

Var l2_normalize(Var x, double eps) {
  const std::size_t n = last_dim(x.shape());
  const std::size_t rows = x.value().size() / n;
  const Tensor& xv = x.value();
  Tensor out(x.shape());
  std::vector<double> inv(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += xv[r * n + i] * xv[r * n + i];
    inv[r] = 1.0 / std::sqrt(ss + eps);
    for (std::size_t i = 0; i < n; ++i) out[r * n + i] = xv[r * n + i] * inv[r];
  }
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix, n, rows, inv = std::move(inv)](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& xv = t.value(ix);
    Tensor* gx = t.grad_buffer(ix);
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += g[r * n + i] * xv[r * n + i];
      const double c = dot * inv[r] * inv[r] * inv[r];
      for (std::size_t i = 0; i < n; ++i) (*gx)[r * n + i] += g[r * n + i] * inv[r] - xv[r * n + i] * c;
    }
  });
}

Var embedding(Var table, std::span<const int> ids) {
  const Shape& s = table.shape();
  if (s.size() != 2) throw DimensionError("embedding: table must be [V, E], got " + shape_str(s));
  const std::size_t V = s[0], E = s[1];
  std::vector<int> idv(ids.begin(), ids.end());
  Tensor out(Shape{idv.size(), E});
  for (std::size_t i = 0; i < idv.size(); ++i) {
    if (idv[i] < 0 || static_cast<std::size_t>(idv[i]) >= V) {
      throw DimensionError("embedding: id " + std::to_string(idv[i]) + " outside table of " + std::to_string(V));
    }
    std::copy_n(table.value().data() + static_cast<std::size_t>(idv[i]) * E, E, out.data() + i * E);
  }
  const std::size_t it = table.id();
  return table.tape().record(std::move(out), {table}, [it, E, idv = std::move(idv)](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor* gt = t.grad_buffer(it);
    for (std::size_t i = 0; i < idv.size(); ++i)
      for (std::size_t e = 0; e < E; ++e) (*gt)[static_cast<std::size_t>(idv[i]) * E + e] += g[i * E + e];
  });
}

Var masked_fill(Var x, const std::vector<std::uint8_t>& blocked, double value) {
  const Shape& s = x.shape();
  if (s.size() < 2 || blocked.size() != s[s.size() - 2] * s.back()) {
    throw DimensionError("masked_fill: mask of " + std::to_string(blocked.size()) + " entries for " + shape_str(s));
  }
  Tensor out = x.value();
  const std::size_t m = blocked.size();
  for (std::size_t i = 0; i < out.size(); ++i)
    if (blocked[i % m]) out[i] = value;
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix, blocked](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor* gx = t.grad_buffer(ix);
    const std::size_t m = blocked.size();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!blocked[i % m]) (*gx)[i] += g[i];
  });
}

Var cross_entropy(Var logits, std::span<const int> targets, int ignore_index) {
  const Shape& s = logits.shape();
  if (s.size() != 2 || s[0] != targets.size()) {
    throw DimensionError("cross_entropy: logits " + shape_str(s) + " vs " + std::to_string(targets.size()) + " targets");
  }
  const std::size_t N = s[0], V = s[1];
  const Tensor& lv = logits.value();
  std::vector<int> tv(targets.begin(), targets.end());
  Tensor probs(s);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < N; ++r) {
    const double* row = lv.data() + r * V;
    const double mx = *std::max_element(row, row + V);
    double z = 0.0;
    for (std::size_t i = 0; i < V; ++i) z += (probs[r * V + i] = std::exp(row[i] - mx));
    for (std::size_t i = 0; i < V; ++i) probs[r * V + i] /= z;
    if (tv[r] == ignore_index) continue;
    if (tv[r] < 0 || static_cast<std::size_t>(tv[r]) >= V) throw DimensionError("cross_entropy: target out of range");
    total += std::log(z) + mx - row[tv[r]];
    ++count;
  }
  if (count == 0) throw ValidationError("cross_entropy: every target is ignored");
  const std::size_t il = logits.id();
  return logits.tape().record(
      Tensor::scalar(total / static_cast<double>(count)), {logits},
      [il, N, V, count, ignore_index, tv = std::move(tv), probs = std::move(probs)](Tape& t, std::size_t self) {
        const double g = t.grad(self)[0] / static_cast<double>(count);
        Tensor* gl = t.grad_buffer(il);
        for (std::size_t r = 0; r < N; ++r) {
          if (tv[r] == ignore_index) continue;
          for (std::size_t i = 0; i < V; ++i) (*gl)[r * V + i] += g * probs[r * V + i];
          (*gl)[r * V + static_cast<std::size_t>(tv[r])] -= g;
        }
      });
}

Var conv1d(Var x, Var weight, Var bias, const Conv1dOptions& o) {
  const Shape& xs = x.shape();
  const Shape& ws = weight.shape();
  if (xs.size() != 3 || ws.size() != 3 || ws[1] != xs[2]) {
    throw DimensionError("conv1d: input " + shape_str(xs) + " incompatible with weight " + shape_str(ws));
  }
  if (o.stride == 0 || o.dilation == 0) throw DimensionError("conv1d: stride and dilation must be positive");
  const std::size_t B = xs[0], T = xs[1], Cin = xs[2], K = ws[0], Cout = ws[2];
  const std::size_t span = o.dilation * (K - 1) + 1;
  if (T + 2 * o.padding < span) throw DimensionError("conv1d: input length " + std::to_string(T) + " shorter than kernel span");
  const std::size_t To = (T + 2 * o.padding - span) / o.stride + 1;
  if (bias.valid() && bias.value().size() != Cout) throw DimensionError("conv1d: bias size mismatch");

  // Source time index of each (output step, tap), or -1 for padding.
  std::vector<long> src(To * K);
  for (std::size_t t = 0; t < To; ++t)
    for (std::size_t k = 0; k < K; ++k) {
      const long s = static_cast<long>(t * o.stride + k * o.dilation) - static_cast<long>(o.padding);
      src[t * K + k] = (s >= 0 && s < static_cast<long>(T)) ? s : -1;
    }
  const Tensor cols = im2col(x.value(), src, B, T, Cin, K, To);
  Tensor out(Shape{B, To, Cout});
  map(out, B * To, Cout).noalias() = cmap(cols, B * To, K * Cin) * cmap(weight.value(), K * Cin, Cout);
  if (bias.valid()) {
    const Tensor& bv = bias.value();
    for (std::size_t r = 0; r < B * To; ++r)
      for (std::size_t c = 0; c < Cout; ++c) out[r * Cout + c] += bv[c];
  }
  const std::size_t ix = x.id(), iw = weight.id();
  const std::size_t ib = bias.valid() ? bias.id() : static_cast<std::size_t>(-1);
  std::vector<Var> inputs{x, weight};
  if (bias.valid()) inputs.push_back(bias);
  return x.tape().record(std::move(out), inputs,
                         [ix, iw, ib, B, T, Cin, K, Cout, To, src = std::move(src)](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const auto gm = cmap(g, B * To, Cout);
    if (Tensor* gw = t.grad_buffer(iw)) {
      const Tensor cols = im2col(t.value(ix), src, B, T, Cin, K, To);
      map(*gw, K * Cin, Cout).noalias() += cmap(cols, B * To, K * Cin).transpose() * gm;
    }
    if (ib != static_cast<std::size_t>(-1)) {
      if (Tensor* gb = t.grad_buffer(ib))
        for (std::size_t r = 0; r < B * To; ++r)
          for (std::size_t c = 0; c < Cout; ++c) (*gb)[c] += g[r * Cout + c];
    }
    if (Tensor* gx = t.grad_buffer(ix)) {
      Tensor dcols(Shape{B * To, K * Cin});
      map(dcols, B * To, K * Cin).noalias() = gm * cmap(t.value(iw), K * Cin, Cout).transpose();
      for (std::size_t b = 0; b < B; ++b)
        for (std::size_t tt = 0; tt < To; ++tt)
          for (std::size_t k = 0; k < K; ++k) {
            const long s = src[tt * K + k];
            if (s < 0) continue;
            double* dst = gx->data() + (b * T + static_cast<std::size_t>(s)) * Cin;
            const double* from = dcols.data() + (b * To + tt) * K * Cin + k * Cin;
            for (std::size_t c = 0; c < Cin; ++c) dst[c] += from[c];
          }
    }
  });
}

Var upsample_repeat(Var x, std::size_t factor) {
  const Shape& s = x.shape();
  if (s.size() != 3 || factor == 0) throw DimensionError("upsample_repeat: expected [B, T, C], got " + shape_str(s));
  const std::size_t B = s[0], T = s[1], C = s[2];
  Tensor out(Shape{B, T * factor, C});
  const Tensor& xv = x.value();
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < T * factor; ++t)
      std::copy_n(xv.data() + (b * T + t / factor) * C, C, out.data() + (b * T * factor + t) * C);
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix, B, T, C, factor](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor* gx = t.grad_buffer(ix);
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t tt = 0; tt < T * factor; ++tt)
        for (std::size_t c = 0; c < C; ++c) (*gx)[(b * T + tt / factor) * C + c] += g[(b * T * factor + tt) * C + c];
  });
}

Var mse(Var a, Var b) {
  if (a.shape() != b.shape()) throw DimensionError("mse: " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  return mean(square(sub(a, b)));
}

}  // namespace humo::nn
