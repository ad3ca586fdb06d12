#include <atomic>
#include <string>

#include "fhn/errors.hpp"
#include "fhn/kernels.hpp"

namespace fhn::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(FHN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&table(best_available())};
  return slot;
}

}  // namespace

bool available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2: {
      static const bool has = cpu_has_avx2();
      return has;
    }
  }
  return false;
}

Backend best_available() {
  return available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

const KernelTable& table(Backend b) {
  if (!available(b)) {
    throw UnsupportedConfiguration("kernel backend '" +
                                   std::string(to_string(b)) +
                                   "' is not available on this CPU");
  }
#if defined(FHN_HAVE_AVX2)
  if (b == Backend::Avx2) return avx2_table();
#endif
  return scalar_table();
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void select(Backend b) { active_slot().store(&table(b), std::memory_order_release); }

Backend active_backend() {
  return &active() == &scalar_table() ? Backend::Scalar : Backend::Avx2;
}

std::string_view to_string(Backend b) {
  return b == Backend::Scalar ? "scalar" : "avx2";
}

Backend parse_backend(std::string_view s) {
  if (s == "scalar") return Backend::Scalar;
  if (s == "avx2") return Backend::Avx2;
  if (s == "auto") return best_available();
  throw DomainError("unknown kernel backend '" + std::string(s) +
                    "' (expected scalar, avx2 or auto)");
}

}  // namespace fhn::kernels
