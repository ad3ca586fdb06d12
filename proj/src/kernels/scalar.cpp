#include <cmath>

#include "fhn/kernels.hpp"

namespace fhn::kernels {
namespace {

void spmv(const CsrView& a, const double* x, double* y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    double acc = 0.0;
    for (std::uint32_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      acc += a.vals[k] * x[a.cols[k]];
    }
    y[r] = acc;
  }
}

void fhn_nodal(const NodalTerms& t) {
  for (std::size_t i = 0; i < t.n; ++i) {
    const double v = t.v[i];
    const double load = t.load ? t.load[i] : 0.0;
    double dv = t.inv_mass[i] * (load - t.kv[i]);
    if (t.reaction) dv += v * (-t.c1 + v * (t.c2 - t.c3 * v));
    if (t.recovery) {
      dv -= t.u[i];
      t.du[i] = t.c5 * v - t.c4 * t.u[i];
    } else {
      t.du[i] = 0.0;
    }
    t.dv[i] = dv;
  }
}

inline double combine(const StageTerms& t, std::size_t i) {
  double acc = t.coeff[0] * t.ks[0][i];
  for (int k = 1; k < t.terms; ++k) acc += t.coeff[k] * t.ks[k][i];
  return acc;
}

void stage(const StageTerms& t) {
  for (std::size_t i = 0; i < t.n; ++i) t.out[i] = t.x[i] + t.h * combine(t, i);
}

double error_rms(const StageTerms& t, const double* x_next, double atol,
                 double rtol) {
  if (t.n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < t.n; ++i) {
    const double scale =
        atol + rtol * std::fmax(std::fabs(t.x[i]), std::fabs(x_next[i]));
    const double e = t.h * combine(t, i) / scale;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(t.n));
}

void hermite(std::size_t n, double theta, double h, const double* x0,
             const double* x1, const double* f0, const double* f1,
             double* out) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = (t3 - 2.0 * t2 + theta) * h;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = (t3 - t2) * h;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = h00 * x0[i] + h10 * f0[i] + h01 * x1[i] + h11 * f1[i];
  }
}

double dot(std::size_t n, const double* a, const double* b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double weighted_sumsq(std::size_t n, const double* w, const double* v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * v[i] * v[i];
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", spmv, fhn_nodal, stage,
                                 error_rms, hermite, dot, weighted_sumsq};
  return table;
}

}  // namespace fhn::kernels
