#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <type_traits>
#include <vector>

#include "gsfv/diffusion.hpp"
#include "gsfv/errors.hpp"
#include "gsfv/field.hpp"

namespace gsfv {

template <typename Scalar>
struct GrayScottParams {
  Scalar d_u;
  Scalar d_v;
  Scalar feed;  ///< F
  Scalar kill;  ///< k

  void validate() const {
    if (!(d_u > 0 && d_v > 0 && feed > 0 && kill > 0)) {
      throw DomainError("Gray-Scott parameters must all be strictly positive");
    }
  }
};

/// Diffusivities used for every experiment: d_u = 1.6e-5, d_v = d_u / 2.
template <typename Scalar = double>
GrayScottParams<Scalar> default_params(Scalar feed = Scalar(0.037), Scalar kill = Scalar(0.060)) {
  return {Scalar(1.6e-5), Scalar(0.8e-5), feed, kill};
}

/// f(u, v) = −u v² + F (1 − u)
template <typename Scalar>
constexpr Scalar reaction_f(Scalar u, Scalar v, Scalar feed) {
  return -u * v * v + feed * (Scalar(1) - u);
}

/// g(u, v) = u v² − (F + k) v
template <typename Scalar>
constexpr Scalar reaction_g(Scalar u, Scalar v, Scalar feed, Scalar kill) {
  return u * v * v - (feed + kill) * v;
}

template <typename Scalar>
struct SimState {
  long n = 0;
  Scalar t = 0;
  CellField<Scalar> u;
  CellField<Scalar> v;
};

/// Manufactured forcing (t, x, y) -> value for each species.
template <typename Scalar>
struct SourceTerms {
  std::function<Scalar(Scalar, Scalar, Scalar)> u;
  std::function<Scalar(Scalar, Scalar, Scalar)> v;
};

/// One step of the IMEX scheme: explicit kinetics and sources at t^n, implicit diffusion.
///
/// Solves A_u u^{n+1} = h² (u^n + dt f(u^n, v^n) + dt S_u(t^n)) and the matching
/// system for v with g. Both species read the old pair (u^n, v^n).
template <typename Scalar>
SimState<Scalar> step(const SimState<Scalar>& state, const GrayScottParams<Scalar>& params,
                      Scalar dt, const std::type_identity_t<SourceTerms<Scalar>>* sources = nullptr,
                      const CgOptions& cg = {}, long* cg_iterations = nullptr) {
  if (!(dt > 0)) throw DomainError("time step must be positive");
  state.u.require_same_mesh(state.v);
  const auto& mesh = state.u.mesh_ptr();
  const Scalar area = mesh->cell_area();

  const auto u = state.u.values().array();
  const auto v = state.v.values().array();
  const auto uvv = (u * v * v).eval();

  using Vector = typename CellField<Scalar>::Vector;
  Vector rhs_u = area * (u + dt * (params.feed * (Scalar(1) - u) - uvv)).matrix();
  Vector rhs_v = area * (v + dt * (uvv - (params.feed + params.kill) * v)).matrix();

  if (sources != nullptr) {
    const Scalar t = state.t;
    if (sources->u) {
      rhs_u += (area * dt) * project(mesh, [&](Scalar x, Scalar y) { return sources->u(t, x, y); })
                                 .values();
    }
    if (sources->v) {
      rhs_v += (area * dt) * project(mesh, [&](Scalar x, Scalar y) { return sources->v(t, x, y); })
                                 .values();
    }
  }

  const ImplicitDiffusionOperator<Scalar> op_u(mesh, params.d_u, dt);
  const ImplicitDiffusionOperator<Scalar> op_v(mesh, params.d_v, dt);
  auto next_u = solve(op_u, CellField<Scalar>(mesh, std::move(rhs_u)), cg);
  auto next_v = solve(op_v, CellField<Scalar>(mesh, std::move(rhs_v)), cg);
  if (cg_iterations != nullptr) *cg_iterations += next_u.iterations + next_v.iterations;
  return {state.n + 1, state.t + dt, std::move(next_u.x), std::move(next_v.x)};
}

struct RunConfig {
  double dt = 1.0;
  double t_end = 1.0;  ///< absolute terminal time
  bool monitor_bounds = true;
  bool monitor_energy = true;
  double bound_tolerance = 1e-12;
  double v_max = 1.0;
  CgOptions cg{};
};

/// Worst-case bounds and the discrete energy ledger of a run.
template <typename Scalar>
struct MonitorReport {
  long steps = 0;
  bool shortened_final_step = false;
  Scalar final_step_dt = 0;
  bool finite = true;         ///< false when a state became NaN/Inf; the run stops there
  long first_nonfinite_step = -1;
  long total_cg_iterations = 0;

  Scalar min_u = std::numeric_limits<Scalar>::infinity();
  Scalar max_u = -std::numeric_limits<Scalar>::infinity();
  Scalar min_v = std::numeric_limits<Scalar>::infinity();
  Scalar max_v = -std::numeric_limits<Scalar>::infinity();
  long bound_violations = 0;  ///< number of states outside [0,1] x [0,v_max] beyond tolerance
  long first_violation_step = -1;

  std::vector<Scalar> mass_energy;  ///< ‖u^n‖² + ‖v^n‖², n = 0..N
  std::vector<Scalar> dissipation;  ///< Σ_{m≤n} dt (d_u |u^m|²_1 + d_v |v^m|²_1), starts at 0
  Scalar max_mass_energy() const {
    return mass_energy.empty() ? Scalar(0)
                               : *std::max_element(mass_energy.begin(), mass_energy.end());
  }
  /// max_n (‖u^n‖² + ‖v^n‖²) + accumulated dissipation
  Scalar energy_ledger() const {
    return max_mass_energy() + (dissipation.empty() ? Scalar(0) : dissipation.back());
  }
};

template <typename Scalar>
struct RunResult {
  SimState<Scalar> final_state;
  MonitorReport<Scalar> report;
};

template <typename Scalar>
using Observer = std::function<void(const SimState<Scalar>&)>;

namespace detail {

template <typename Scalar>
void record_state(const SimState<Scalar>& s, const GrayScottParams<Scalar>& params,
                  const RunConfig& config, Scalar step_dt, MonitorReport<Scalar>& report) {
  if (config.monitor_bounds) {
    const Scalar umin = s.u.values().minCoeff();
    const Scalar umax = s.u.values().maxCoeff();
    const Scalar vmin = s.v.values().minCoeff();
    const Scalar vmax = s.v.values().maxCoeff();
    report.min_u = std::min(report.min_u, umin);
    report.max_u = std::max(report.max_u, umax);
    report.min_v = std::min(report.min_v, vmin);
    report.max_v = std::max(report.max_v, vmax);
    const auto tol = static_cast<Scalar>(config.bound_tolerance);
    const bool bad = umin < -tol || umax > Scalar(1) + tol || vmin < -tol ||
                     vmax > static_cast<Scalar>(config.v_max) + tol;
    if (bad) {
      if (report.first_violation_step < 0) report.first_violation_step = s.n;
      ++report.bound_violations;
    }
  }
  if (config.monitor_energy) {
    report.mass_energy.push_back(inner_h(s.u, s.u) + inner_h(s.v, s.v));
    const Scalar prev = report.dissipation.empty() ? Scalar(0) : report.dissipation.back();
    const Scalar add = step_dt * (params.d_u * grad_form_h(s.u, s.u) +
                                  params.d_v * grad_form_h(s.v, s.v));
    report.dissipation.push_back(report.dissipation.empty() ? Scalar(0) : prev + add);
  }
}

}  // namespace detail

/// Advances `initial` to config.t_end.
///
/// Uses round((t_end − t0) / dt) full steps when that ratio is integral to 1e-9
/// relative, otherwise the last step is shortened to land on t_end exactly.
/// Observers see every state after a step. A non-finite state ends the run early.
template <typename Scalar>
RunResult<Scalar> run(const SimState<Scalar>& initial, const GrayScottParams<Scalar>& params,
                      const RunConfig& config, const std::type_identity_t<SourceTerms<Scalar>>* sources = nullptr,
                      const std::vector<Observer<Scalar>>& observers = {}) {
  const Scalar dt = static_cast<Scalar>(config.dt);
  const Scalar t0 = initial.t;
  const Scalar duration = static_cast<Scalar>(config.t_end) - t0;
  if (!(dt > 0)) throw DomainError("time step must be positive");
  if (!(duration >= dt * (Scalar(1) - Scalar(1e-9)))) {
    throw DomainError("terminal time must be at least one step past the initial time");
  }

  const Scalar ratio = duration / dt;
  long full_steps = std::lround(ratio);
  Scalar last_dt = 0;
  if (std::abs(ratio - static_cast<Scalar>(full_steps)) > Scalar(1e-9) * ratio) {
    full_steps = static_cast<long>(std::floor(ratio));
    last_dt = duration - static_cast<Scalar>(full_steps) * dt;
  }

  RunResult<Scalar> result{initial, {}};
  auto& report = result.report;
  report.shortened_final_step = last_dt > 0;
  report.final_step_dt = last_dt > 0 ? last_dt : dt;
  detail::record_state(result.final_state, params, config, Scalar(0), report);

  const long total = full_steps + (last_dt > 0 ? 1 : 0);
  long iterations = 0;
  for (long n = 0; n < total; ++n) {
    const bool last = n + 1 == total;
    const Scalar this_dt = (last && last_dt > 0) ? last_dt : dt;
    auto next = [&] {
      try {
        return step(result.final_state, params, this_dt, sources, config.cg, &iterations);
      } catch (const NoConvergence& e) {
        throw StepFailure(result.final_state.n, e.what());
      }
    }();
    next.t = last ? static_cast<Scalar>(config.t_end) : t0 + static_cast<Scalar>(n + 1) * dt;
    result.final_state = std::move(next);
    ++report.steps;
    if (!result.final_state.u.is_finite() || !result.final_state.v.is_finite()) {
      report.finite = false;
      report.first_nonfinite_step = result.final_state.n;
      break;
    }
    detail::record_state(result.final_state, params, config, this_dt, report);
    for (const auto& observe : observers) observe(result.final_state);
  }
  report.total_cg_iterations = iterations;
  return result;
}

}  // namespace gsfv
