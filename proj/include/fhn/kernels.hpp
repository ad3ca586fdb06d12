#pragma once

// Data-parallel inner loops of the solver. Each kernel has a scalar
// reference implementation and, where the CPU supports it, an AVX2/FMA
// variant. The active table is chosen once at startup (or explicitly via
// select()); a given table produces bitwise-reproducible results, and the
// variants agree with the scalar reference to rounding.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace fhn::kernels {

enum class Backend { Scalar, Avx2 };

/// Borrowed view of a CSR matrix with 32-bit indices.
struct CsrView {
  std::size_t rows = 0;
  const std::uint32_t* row_ptr = nullptr;
  const std::uint32_t* cols = nullptr;
  const double* vals = nullptr;
};

/// Inputs of the nodal FitzHugh-Nagumo right-hand side
///   dv = inv_mass * (load - kv) + p3(v) - u
///   du = c5 v - c4 u
/// with the reaction and recovery couplings individually switchable.
/// `load` may be null (treated as zero).
struct NodalTerms {
  std::size_t n = 0;
  const double* v = nullptr;
  const double* u = nullptr;
  const double* kv = nullptr;
  const double* load = nullptr;
  const double* inv_mass = nullptr;
  double c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;
  bool reaction = true;
  bool recovery = true;
  double* dv = nullptr;
  double* du = nullptr;
};

/// out = x + h * sum_k coeff[k] * ks[k], for k < terms (terms <= 4).
struct StageTerms {
  std::size_t n = 0;
  const double* x = nullptr;
  double h = 0;
  int terms = 0;
  double coeff[4] = {0, 0, 0, 0};
  const double* ks[4] = {nullptr, nullptr, nullptr, nullptr};
  double* out = nullptr;
};

struct KernelTable {
  std::string_view name;
  void (*spmv)(const CsrView& a, const double* x, double* y);
  void (*fhn_nodal)(const NodalTerms& t);
  void (*stage)(const StageTerms& t);
  /// sqrt(mean_i (err_i / (atol + rtol max(|x_i|,|xn_i|)))^2), where
  /// err = h * sum_k coeff[k] ks[k] (uses StageTerms with out ignored and
  /// x the step start).
  double (*error_rms)(const StageTerms& err, const double* x_next,
                      double atol, double rtol);
  /// Cubic Hermite interpolant at fraction theta of a step of length h.
  void (*hermite)(std::size_t n, double theta, double h, const double* x0,
                  const double* x1, const double* f0, const double* f1,
                  double* out);
  double (*dot)(std::size_t n, const double* a, const double* b);
  /// sum_i w_i v_i^2
  double (*weighted_sumsq)(std::size_t n, const double* w, const double* v);
};

const KernelTable& scalar_table();
#if defined(FHN_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

bool available(Backend b);
Backend best_available();
const KernelTable& table(Backend b);

/// Table used by the solver. Defaults to best_available().
const KernelTable& active();
void select(Backend b);
Backend active_backend();

std::string_view to_string(Backend b);
/// Parses "scalar", "avx2" or "auto"; throws DomainError otherwise.
Backend parse_backend(std::string_view s);

}  // namespace fhn::kernels
