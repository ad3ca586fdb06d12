// AVX2/FMA variants of the solver kernels. Compiled with -mavx2 -mfma and
// only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "fhn/kernels.hpp"

namespace fhn::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void spmv(const CsrView& a, const double* x, double* y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    std::uint32_t k = a.row_ptr[r];
    const std::uint32_t end = a.row_ptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx =
          _mm_loadu_si128(reinterpret_cast<const __m128i*>(a.cols + k));
      const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(a.vals + k), xv, acc);
    }
    double sum = hsum(acc);
    for (; k < end; ++k) sum = std::fma(a.vals[k], x[a.cols[k]], sum);
    y[r] = sum;
  }
}

void fhn_nodal(const NodalTerms& t) {
  const __m256d c1 = _mm256_set1_pd(-t.c1);
  const __m256d c2 = _mm256_set1_pd(t.c2);
  const __m256d c3 = _mm256_set1_pd(t.c3);
  const __m256d c4 = _mm256_set1_pd(t.c4);
  const __m256d c5 = _mm256_set1_pd(t.c5);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= t.n; i += 4) {
    const __m256d v = _mm256_loadu_pd(t.v + i);
    const __m256d load = t.load ? _mm256_loadu_pd(t.load + i) : zero;
    __m256d dv = _mm256_mul_pd(_mm256_loadu_pd(t.inv_mass + i),
                               _mm256_sub_pd(load, _mm256_loadu_pd(t.kv + i)));
    if (t.reaction) {
      // v * (-c1 + v * (c2 - c3 v))
      const __m256d inner = _mm256_fnmadd_pd(c3, v, c2);
      dv = _mm256_fmadd_pd(v, _mm256_fmadd_pd(v, inner, c1), dv);
    }
    if (t.recovery) {
      const __m256d u = _mm256_loadu_pd(t.u + i);
      dv = _mm256_sub_pd(dv, u);
      _mm256_storeu_pd(t.du + i, _mm256_fnmadd_pd(c4, u, _mm256_mul_pd(c5, v)));
    } else {
      _mm256_storeu_pd(t.du + i, zero);
    }
    _mm256_storeu_pd(t.dv + i, dv);
  }
  for (; i < t.n; ++i) {
    const double v = t.v[i];
    const double load = t.load ? t.load[i] : 0.0;
    double dv = t.inv_mass[i] * (load - t.kv[i]);
    if (t.reaction) dv = std::fma(v, std::fma(v, std::fma(-t.c3, v, t.c2), -t.c1), dv);
    if (t.recovery) {
      dv -= t.u[i];
      t.du[i] = std::fma(-t.c4, t.u[i], t.c5 * v);
    } else {
      t.du[i] = 0.0;
    }
    t.dv[i] = dv;
  }
}

inline __m256d combine4(const StageTerms& t, std::size_t i) {
  __m256d acc = _mm256_mul_pd(_mm256_set1_pd(t.coeff[0]), _mm256_loadu_pd(t.ks[0] + i));
  for (int k = 1; k < t.terms; ++k) {
    acc = _mm256_fmadd_pd(_mm256_set1_pd(t.coeff[k]), _mm256_loadu_pd(t.ks[k] + i), acc);
  }
  return acc;
}

inline double combine1(const StageTerms& t, std::size_t i) {
  double acc = t.coeff[0] * t.ks[0][i];
  for (int k = 1; k < t.terms; ++k) acc = std::fma(t.coeff[k], t.ks[k][i], acc);
  return acc;
}

void stage(const StageTerms& t) {
  const __m256d h = _mm256_set1_pd(t.h);
  std::size_t i = 0;
  for (; i + 4 <= t.n; i += 4) {
    _mm256_storeu_pd(t.out + i,
                     _mm256_fmadd_pd(h, combine4(t, i), _mm256_loadu_pd(t.x + i)));
  }
  for (; i < t.n; ++i) t.out[i] = std::fma(t.h, combine1(t, i), t.x[i]);
}

double error_rms(const StageTerms& t, const double* x_next, double atol,
                 double rtol) {
  if (t.n == 0) return 0.0;
  const __m256d h = _mm256_set1_pd(t.h);
  const __m256d va = _mm256_set1_pd(atol);
  const __m256d vr = _mm256_set1_pd(rtol);
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= t.n; i += 4) {
    const __m256d ax = _mm256_andnot_pd(sign, _mm256_loadu_pd(t.x + i));
    const __m256d an = _mm256_andnot_pd(sign, _mm256_loadu_pd(x_next + i));
    const __m256d scale = _mm256_fmadd_pd(vr, _mm256_max_pd(ax, an), va);
    const __m256d e = _mm256_div_pd(_mm256_mul_pd(h, combine4(t, i)), scale);
    acc = _mm256_fmadd_pd(e, e, acc);
  }
  double sum = hsum(acc);
  for (; i < t.n; ++i) {
    const double scale =
        std::fma(rtol, std::fmax(std::fabs(t.x[i]), std::fabs(x_next[i])), atol);
    const double e = t.h * combine1(t, i) / scale;
    sum = std::fma(e, e, sum);
  }
  return std::sqrt(sum / static_cast<double>(t.n));
}

void hermite(std::size_t n, double theta, double h, const double* x0,
             const double* x1, const double* f0, const double* f1,
             double* out) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  const __m256d h00 = _mm256_set1_pd(2.0 * t3 - 3.0 * t2 + 1.0);
  const __m256d h10 = _mm256_set1_pd((t3 - 2.0 * t2 + theta) * h);
  const __m256d h01 = _mm256_set1_pd(-2.0 * t3 + 3.0 * t2);
  const __m256d h11 = _mm256_set1_pd((t3 - t2) * h);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_mul_pd(h00, _mm256_loadu_pd(x0 + i));
    r = _mm256_fmadd_pd(h10, _mm256_loadu_pd(f0 + i), r);
    r = _mm256_fmadd_pd(h01, _mm256_loadu_pd(x1 + i), r);
    r = _mm256_fmadd_pd(h11, _mm256_loadu_pd(f1 + i), r);
    _mm256_storeu_pd(out + i, r);
  }
  const double s00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double s10 = (t3 - 2.0 * t2 + theta) * h;
  const double s01 = -2.0 * t3 + 3.0 * t2;
  const double s11 = (t3 - t2) * h;
  for (; i < n; ++i) {
    out[i] = s00 * x0[i] + s10 * f0[i] + s01 * x1[i] + s11 * f1[i];
  }
}

double dot(std::size_t n, const double* a, const double* b) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum = std::fma(a[i], b[i], sum);
  return sum;
}

double weighted_sumsq(std::size_t n, const double* w, const double* v) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), x), x, acc);
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum = std::fma(w[i] * v[i], v[i], sum);
  return sum;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", spmv, fhn_nodal, stage,
                                 error_rms, hermite, dot, weighted_sumsq};
  return table;
}

}  // namespace fhn::kernels
