#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <utility>

#include "gsfv/errors.hpp"
#include "gsfv/mesh.hpp"

namespace gsfv {

/// Piecewise-constant grid function: one value per cell, row-major like the mesh.
template <typename Scalar>
class CellField {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit CellField(MeshPtr<Scalar> mesh, Scalar fill = Scalar(0))
      : mesh_(std::move(mesh)), values_(Vector::Constant(mesh_->num_cells(), fill)) {}

  CellField(MeshPtr<Scalar> mesh, Vector values) : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (values_.size() != mesh_->num_cells()) {
      throw InvalidSize("field has " + std::to_string(values_.size()) + " values for " +
                        std::to_string(mesh_->num_cells()) + " cells");
    }
  }

  const UniformMesh<Scalar>& mesh() const noexcept { return *mesh_; }
  const MeshPtr<Scalar>& mesh_ptr() const noexcept { return mesh_; }

  Vector& values() noexcept { return values_; }
  const Vector& values() const noexcept { return values_; }

  Scalar& operator[](Eigen::Index k) { return values_[k]; }
  Scalar operator[](Eigen::Index k) const { return values_[k]; }
  Eigen::Index size() const noexcept { return values_.size(); }

  bool on_same_mesh(const CellField& other) const noexcept {
    return mesh_ == other.mesh_ || mesh_->same_geometry(*other.mesh_);
  }

  /// True when no value is NaN or infinite.
  bool is_finite() const { return values_.allFinite(); }

  CellField& operator+=(const CellField& other) {
    require_same_mesh(other);
    values_ += other.values_;
    return *this;
  }
  CellField& operator-=(const CellField& other) {
    require_same_mesh(other);
    values_ -= other.values_;
    return *this;
  }
  CellField& operator*=(Scalar s) {
    values_ *= s;
    return *this;
  }

  friend CellField operator+(CellField a, const CellField& b) { return a += b; }
  friend CellField operator-(CellField a, const CellField& b) { return a -= b; }
  friend CellField operator*(Scalar s, CellField a) { return a *= s; }

  void require_same_mesh(const CellField& other) const {
    if (!on_same_mesh(other)) throw MeshMismatch();
  }

 private:
  MeshPtr<Scalar> mesh_;
  Vector values_;
};

enum class Quadrature {
  Midpoint = 1,
  Gauss3 = 3,  ///< tensor 3-point Gauss-Legendre, exact for degree <= 5 per variable
};

/// Cellwise average interpolant: value_K ≈ (1/|K|) ∫_K f.
template <typename Scalar, typename Fn>
CellField<Scalar> project(const MeshPtr<Scalar>& mesh, Fn&& f,
                          Quadrature order = Quadrature::Midpoint) {
  CellField<Scalar> out(mesh);
  const Scalar h = mesh->h();
  if (order == Quadrature::Midpoint) {
    for (Eigen::Index k = 0; k < mesh->num_cells(); ++k) {
      const auto c = mesh->cell_center(k);
      out[k] = f(c.x(), c.y());
    }
    return out;
  }
  const Scalar offset = std::sqrt(Scalar(3) / Scalar(5)) * h / Scalar(2);
  const std::array<Scalar, 3> nodes{-offset, Scalar(0), offset};
  const std::array<Scalar, 3> weights{Scalar(5) / Scalar(18), Scalar(8) / Scalar(18),
                                      Scalar(5) / Scalar(18)};
  for (Eigen::Index k = 0; k < mesh->num_cells(); ++k) {
    const auto c = mesh->cell_center(k);
    Scalar acc(0);
    for (std::size_t b = 0; b < 3; ++b) {
      Scalar row(0);
      for (std::size_t a = 0; a < 3; ++a) {
        row += weights[a] * f(c.x() + nodes[a], c.y() + nodes[b]);
      }
      acc += weights[b] * row;
    }
    out[k] = acc;
  }
  return out;
}

/// (w, φ)_h = h² Σ_K w_K φ_K
template <typename Scalar>
Scalar inner_h(const CellField<Scalar>& w, const CellField<Scalar>& phi) {
  w.require_same_mesh(phi);
  return w.mesh().cell_area() * w.values().dot(phi.values());
}

/// (∇w, ∇φ)_h = Σ_σ τ_σ (w_K − w_L)(φ_K − φ_L) over interior faces.
template <typename Scalar>
Scalar grad_form_h(const CellField<Scalar>& w, const CellField<Scalar>& phi) {
  w.require_same_mesh(phi);
  Scalar acc(0);
  for (const auto& face : w.mesh().interior_faces()) {
    acc += face.transmissibility * (w[face.inner] - w[face.outer]) *
           (phi[face.inner] - phi[face.outer]);
  }
  return acc;
}

template <typename Scalar>
Scalar norm_l2_h(const CellField<Scalar>& w) {
  return std::sqrt(inner_h(w, w));
}

template <typename Scalar>
Scalar norm_linf(const CellField<Scalar>& w) {
  return w.values().template lpNorm<Eigen::Infinity>();
}

template <typename Scalar>
Scalar seminorm_h1_h(const CellField<Scalar>& w) {
  return std::sqrt(grad_form_h(w, w));
}

/// Largest face jump |w_K − w_L| / d_KL, a discrete analogue of ‖∇w‖_∞.
template <typename Scalar>
Scalar max_face_gradient(const CellField<Scalar>& w) {
  Scalar best(0);
  for (const auto& face : w.mesh().interior_faces()) {
    best = std::max(best, std::abs(w[face.inner] - w[face.outer]) / w.mesh().h());
  }
  return best;
}

}  // namespace gsfv
