#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <optional>

#include "gsfv/errors.hpp"
#include "gsfv/field.hpp"
#include "gsfv/mesh.hpp"

namespace gsfv {

/// Matrix-free form of a_h(u, φ) = (u, φ)_h + dt·d·(∇u, ∇φ)_h.
///
/// The induced matrix is (A u)_K = h² u_K + dt·d·Σ_{L~K} τ_σ (u_K − u_L),
/// symmetric positive definite with smallest eigenvalue ≥ h².
template <typename Scalar>
class ImplicitDiffusionOperator {
 public:
  using Vector = typename CellField<Scalar>::Vector;

  ImplicitDiffusionOperator(MeshPtr<Scalar> mesh, Scalar diffusivity, Scalar dt)
      : mesh_(std::move(mesh)), diffusivity_(diffusivity), dt_(dt) {
    if (!(diffusivity > 0) || !(dt > 0)) {
      throw DomainError("implicit operator needs d > 0 and dt > 0");
    }
  }

  const UniformMesh<Scalar>& mesh() const noexcept { return *mesh_; }
  const MeshPtr<Scalar>& mesh_ptr() const noexcept { return mesh_; }
  Scalar diffusivity() const noexcept { return diffusivity_; }
  Scalar dt() const noexcept { return dt_; }

  /// out = A x on raw coefficient vectors.
  void apply_to(const Vector& x, Vector& out) const {
    const Scalar coupling = dt_ * diffusivity_;
    out.noalias() = mesh_->cell_area() * x;
    for (const auto& face : mesh_->interior_faces()) {
      const Scalar flux = coupling * face.transmissibility * (x[face.inner] - x[face.outer]);
      out[face.inner] += flux;
      out[face.outer] -= flux;
    }
  }

  CellField<Scalar> apply(const CellField<Scalar>& u) const {
    if (!u.mesh().same_geometry(*mesh_)) throw MeshMismatch();
    Vector out(u.size());
    apply_to(u.values(), out);
    return CellField<Scalar>(mesh_, std::move(out));
  }

 private:
  MeshPtr<Scalar> mesh_;
  Scalar diffusivity_;
  Scalar dt_;
};

struct CgOptions {
  double tolerance = 1e-10;  ///< relative residual ‖A x − b‖₂ / ‖b‖₂
  int max_iterations = 1000;
};

template <typename Scalar>
struct CgSolution {
  CellField<Scalar> x;
  int iterations;
  Scalar relative_residual;
};

/// Conjugate gradients on the SPD implicit operator.
///
/// Starts from `guess` when supplied, otherwise from rhs / h² (the solution
/// without diffusion). Throws NoConvergence when the cap is reached.
template <typename Scalar>
CgSolution<Scalar> solve(const ImplicitDiffusionOperator<Scalar>& op, const CellField<Scalar>& rhs,
                         const CgOptions& options = {},
                         std::optional<CellField<Scalar>> guess = std::nullopt) {
  using Vector = typename CellField<Scalar>::Vector;
  if (!rhs.mesh().same_geometry(op.mesh())) throw MeshMismatch();
  if (!(options.tolerance > 0 && options.tolerance < 1) || options.max_iterations < 1) {
    throw DomainError("CG needs tolerance in (0, 1) and at least one iteration");
  }

  const Vector& b = rhs.values();
  Vector x = guess ? std::move(guess->values()) : Vector(b / op.mesh().cell_area());
  if (x.size() != b.size()) throw MeshMismatch();

  const Scalar b_norm = b.norm();
  if (b_norm == Scalar(0)) {
    return {CellField<Scalar>(op.mesh_ptr(), Vector::Zero(b.size())), 0, Scalar(0)};
  }
  if (!std::isfinite(b_norm)) {
    // Corrupted data: hand back the mass-only solution so callers can flag it.
    return {CellField<Scalar>(op.mesh_ptr(), Vector(b / op.mesh().cell_area())), 0,
            std::numeric_limits<Scalar>::quiet_NaN()};
  }
  const Scalar target = static_cast<Scalar>(options.tolerance) * b_norm;

  Vector ap(b.size());
  op.apply_to(x, ap);
  Vector r = b - ap;
  Scalar rr = r.squaredNorm();
  if (std::sqrt(rr) <= target) {
    return {CellField<Scalar>(op.mesh_ptr(), std::move(x)), 0, std::sqrt(rr) / b_norm};
  }
  Vector p = r;
  for (int it = 1; it <= options.max_iterations; ++it) {
    op.apply_to(p, ap);
    const Scalar alpha = rr / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    const Scalar rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= target) {
      return {CellField<Scalar>(op.mesh_ptr(), std::move(x)), it, std::sqrt(rr_next) / b_norm};
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  // Report the true residual, not the recursively updated one.
  op.apply_to(x, ap);
  throw NoConvergence(options.max_iterations, static_cast<double>((b - ap).norm() / b_norm));
}

}  // namespace gsfv
