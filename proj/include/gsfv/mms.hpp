#pragma once

#include <array>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "gsfv/imex.hpp"
#include "gsfv/mesh.hpp"

namespace gsfv::mms {

using Params = GrayScottParams<double>;
using SpaceTimeFn = std::function<double(double t, double x, double y)>;

/// Exact pair (u*, v*) of the forced Gray-Scott system and the forcing that makes it exact:
///   ∂t u = d_u Δu − u v² + F(1 − u) + S_u
///   ∂t v = d_v Δv + u v² − (F + k) v + S_v
struct ManufacturedCase {
  std::string label;
  Params params;
  SpaceTimeFn u_star;
  SpaceTimeFn v_star;
  SpaceTimeFn s_u;
  SpaceTimeFn s_v;

  SourceTerms<double> sources() const { return {s_u, s_v}; }
};

/// u* = 1 − a cos(2πx)cos(2πy)cos(2πt), v* = ¼ + ¼ cos(2πx)cos(2πy)cos(2πt).
ManufacturedCase trig_case(double a, const Params& params);

enum class TanhGeometry {
  Consistent,    ///< r = cos(2π(x−½)) + cos(2π(y−½)) with its own derivatives
  PaperLiteral,  ///< r = cos(πx) + cos(πy), the field the printed ∇r, Δr belong to
};

struct TanhOptions {
  double eps = 0.1;
  double r00 = 0.25;
  double amplitude = 0.25;
  double lambda = 2.0 * std::numbers::pi;
  TanhGeometry geometry = TanhGeometry::Consistent;
};

/// Moving interface u* = ½[1 + tanh(s/ε)], v* = 1 − u*, s = r00 + A sin(λt) − r(x, y).
ManufacturedCase tanh_case(const TanhOptions& options, const Params& params);

/// u* ≡ 1, v* ≡ 0 with zero forcing: the homogeneous steady state.
ManufacturedCase steady_case(const Params& params);

struct Defect {
  double u;
  double v;
};

/// Max over cell centers of the finite-difference defect of the forced system.
///
/// Time derivative by central differences with step dt_fd, Laplacian by the
/// 5-point stencil with the mesh spacing. Independent of the closed-form
/// derivatives baked into the sources, so a wrong source term shows up here.
Defect residual_check(const ManufacturedCase& mcase, double t, const UniformMesh<double>& mesh,
                      double dt_fd);

struct ErrorRow {
  double key = 0;  ///< study variable: nx, multiplier k or eps
  double h = 0;
  double dt = 0;
  double err_l2_u = 0;    ///< max over samples of ‖u_h − I_h u*‖_{l2,h}
  double err_l2_v = 0;
  double err_linf_u = 0;  ///< max over samples of max_K |u_K − (I_h u*)_K|
  double err_linf_v = 0;
  double runtime_s = 0;
  bool finite = true;
  long steps = 0;
};

struct ErrorTable {
  std::string key_name;    ///< "nx", "k" or "eps"
  std::string order_axis;  ///< what the slopes are fitted against: "h^2", "dt" or "eps"
  std::vector<ErrorRow> rows;
  std::array<double, 4> orders{};  ///< slopes for l2_u, l2_v, linf_u, linf_v
  std::map<std::string, std::string> metadata;
};

/// Sample times {T/10, 2T/10, ..., T}.
std::vector<double> default_sample_times(double t_end);

/// Largest step not above h² that divides the sample spacing into whole steps.
double convergence_dt(double h, double sample_spacing);

/// Runs the scheme from the projected exact initial data and records the
/// discrete L∞(L²) and L∞(L∞) errors over `sample_times`.
ErrorRow error_norms(const ManufacturedCase& mcase, const MeshPtr<double>& mesh, double dt,
                     double t_end, const std::vector<double>& sample_times,
                     const CgOptions& cg = {});

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

ErrorTable convergence_study(const ManufacturedCase& mcase, const std::vector<int>& sizes,
                             double t_end, const std::vector<double>& sample_times);

ErrorTable stability_study(const ManufacturedCase& mcase, int nx, const std::vector<double>& multipliers,
                           double t_end, const std::vector<double>& sample_times);

ErrorTable interface_study(const Params& params, const std::vector<double>& eps_list, int nx,
                           double dt, double t_end, const std::vector<double>& sample_times,
                           const TanhOptions& base = {});

/// Worker cap for study rows: GSFV_THREADS if set, else hardware concurrency.
unsigned worker_count();

}  // namespace gsfv::mms
