#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fhn/mesh.hpp"
#include "fhn/model.hpp"
#include "fhn/sparse.hpp"

namespace fhn {

/// P1 Galerkin operators on a mesh.
///   mass       M_ab = int phi_a phi_b
///   stiffness  K_ab = int grad phi_a . D grad phi_b
/// The lumped mass is the row-sum diagonal of M.
struct AssembledOperators {
  CsrMatrix mass;
  CsrMatrix stiffness;
  std::vector<double> lumped_mass;
  std::vector<double> inv_lumped_mass;

  std::size_t size() const { return lumped_mass.size(); }
};

/// Element-exact assembly for constant D. Throws DomainError when D is not
/// symmetric positive definite.
AssembledOperators assemble(const Mesh& mesh, const Diffusion& diffusion);

enum class OutputKind { BoundarySegments, Distributed };

/// Discrete output map y_i = b_i^T v. Columns are dense node-weight
/// vectors; `support` lists the nonzero entries of each column for fast
/// evaluation.
class OutputOperator {
 public:
  OutputOperator() = default;
  OutputOperator(OutputKind kind, std::vector<std::vector<double>> columns);

  OutputKind kind() const { return kind_; }
  std::size_t outputs() const { return columns_.size(); }
  std::size_t nodes() const { return columns_.empty() ? 0 : columns_[0].size(); }
  const std::vector<double>& column(std::size_t i) const { return columns_[i]; }

  /// y = B' v
  void apply(std::span<const double> v, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> v) const;

  /// out += sum_i coeff[i] b_i
  void inject(std::span<const double> coeff, std::span<double> out) const;

 private:
  struct Entry {
    std::uint32_t node;
    double weight;
  };
  OutputKind kind_ = OutputKind::BoundarySegments;
  std::vector<std::vector<double>> columns_;
  std::vector<std::vector<Entry>> support_;
};

/// Trapezoidal line integrals over the four sides (exact for P1 traces).
OutputOperator boundary_output(const Mesh& mesh);

/// Single column b = M mask, so that b^T v approximates <mask, v>.
OutputOperator distributed_output(const Mesh& mesh, std::span<const double> mask,
                                  const AssembledOperators& ops);

/// Galerkin load vector of the control term: sum_i i_se[i] b_i.
std::vector<double> control_injection(const OutputOperator& out,
                                      const AssembledOperators& ops,
                                      std::span<const double> i_se);

/// Nodal interpolant of f.
std::vector<double> interpolate(const Mesh& mesh,
                                const std::function<double(double, double)>& f);

}  // namespace fhn
