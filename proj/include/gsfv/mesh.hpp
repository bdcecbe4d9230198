#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "gsfv/errors.hpp"

namespace gsfv {

/// Interior face between cells `inner` and `outer` with transmissibility |σ|/d_KL.
template <typename Scalar>
struct Face {
  Eigen::Index inner;
  Eigen::Index outer;
  Scalar transmissibility;
};

/// Uniform Cartesian grid of square control volumes over a rectangle.
///
/// Cells are numbered row-major with x fastest: k = j * nx + i. Only interior
/// faces are stored; boundary faces carry zero flux (homogeneous Neumann) and
/// therefore never appear in any sum. Immutable once built.
template <typename Scalar>
class UniformMesh {
 public:
  using Point = Eigen::Matrix<Scalar, 2, 1>;

  UniformMesh(Eigen::Index nx, Eigen::Index ny, Scalar lx, Scalar ly, Point origin = Point::Zero())
      : nx_(nx), ny_(ny), origin_(origin) {
    if (nx < 2 || ny < 2) {
      throw InvalidSize("mesh needs at least 2 cells per direction, got " + std::to_string(nx) +
                        "x" + std::to_string(ny));
    }
    if (!(lx > 0) || !(ly > 0)) {
      throw InvalidSize("domain lengths must be positive");
    }
    const Scalar hx = lx / static_cast<Scalar>(nx);
    const Scalar hy = ly / static_cast<Scalar>(ny);
    if (std::abs(hx - hy) > Scalar(1e-12) * std::max(hx, hy)) {
      throw NonSquareCells("cell sides differ: " + std::to_string(static_cast<double>(hx)) +
                           " vs " + std::to_string(static_cast<double>(hy)));
    }
    h_ = hx;

    faces_.reserve(static_cast<std::size_t>(ny * (nx - 1) + nx * (ny - 1)));
    // x-faces: between (i, j) and (i + 1, j)
    for (Eigen::Index j = 0; j < ny; ++j) {
      for (Eigen::Index i = 0; i + 1 < nx; ++i) {
        const Eigen::Index k = j * nx + i;
        faces_.push_back({k, k + 1, h_ / h_});
      }
    }
    // y-faces: between (i, j) and (i, j + 1)
    for (Eigen::Index j = 0; j + 1 < ny; ++j) {
      for (Eigen::Index i = 0; i < nx; ++i) {
        const Eigen::Index k = j * nx + i;
        faces_.push_back({k, k + nx, h_ / h_});
      }
    }
  }

  Eigen::Index nx() const noexcept { return nx_; }
  Eigen::Index ny() const noexcept { return ny_; }
  Eigen::Index num_cells() const noexcept { return nx_ * ny_; }
  Scalar h() const noexcept { return h_; }
  Scalar cell_area() const noexcept { return h_ * h_; }
  const Point& origin() const noexcept { return origin_; }
  Scalar length_x() const noexcept { return h_ * static_cast<Scalar>(nx_); }
  Scalar length_y() const noexcept { return h_ * static_cast<Scalar>(ny_); }
  const std::vector<Face<Scalar>>& interior_faces() const noexcept { return faces_; }

  Point cell_center(Eigen::Index k) const {
    if (k < 0 || k >= num_cells()) {
      throw IndexOutOfRange("cell index " + std::to_string(k) + " outside [0, " +
                            std::to_string(num_cells()) + ")");
    }
    const Eigen::Index i = k % nx_;
    const Eigen::Index j = k / nx_;
    return origin_ + Point((static_cast<Scalar>(i) + Scalar(0.5)) * h_,
                           (static_cast<Scalar>(j) + Scalar(0.5)) * h_);
  }

  /// Number of interior faces touching cell k.
  int incidence(Eigen::Index k) const {
    const Eigen::Index i = k % nx_;
    const Eigen::Index j = k / nx_;
    return (i > 0) + (i + 1 < nx_) + (j > 0) + (j + 1 < ny_);
  }

  bool same_geometry(const UniformMesh& other) const noexcept {
    return nx_ == other.nx_ && ny_ == other.ny_ && h_ == other.h_ && origin_ == other.origin_;
  }

 private:
  Eigen::Index nx_;
  Eigen::Index ny_;
  Scalar h_{};
  Point origin_;
  std::vector<Face<Scalar>> faces_;
};

template <typename Scalar>
using MeshPtr = std::shared_ptr<const UniformMesh<Scalar>>;

/// Shared, immutable mesh over [0, lx] x [0, ly].
template <typename Scalar = double>
MeshPtr<Scalar> build_mesh(Eigen::Index nx, Eigen::Index ny, Scalar lx = Scalar(1),
                           Scalar ly = Scalar(1)) {
  return std::make_shared<const UniformMesh<Scalar>>(nx, ny, lx, ly);
}

/// Square mesh of the unit square with n cells per side.
template <typename Scalar = double>
MeshPtr<Scalar> unit_square(Eigen::Index n) {
  return build_mesh<Scalar>(n, n, Scalar(1), Scalar(1));
}

}  // namespace gsfv
