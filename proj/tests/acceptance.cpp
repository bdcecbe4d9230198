// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset, e.g. `acceptance 5 6 7`.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "gsfv/diffusion.hpp"
#include "gsfv/mms.hpp"
#include "gsfv/patterns.hpp"

using namespace gsfv;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

const mms::Params kParams = default_params<double>();
const std::vector<int> kSizes{16, 32, 64, 128};

void print_table(const mms::ErrorTable& t) {
  for (const auto& r : t.rows) {
    std::printf("      %s=%-8g h=%-10g dt=%-12.6g L2u=%.4e L2v=%.4e Linf_u=%.4e Linf_v=%.4e  %.1fs\n",
                t.key_name.c_str(), r.key, r.h, r.dt, r.err_l2_u, r.err_l2_v, r.err_linf_u,
                r.err_linf_v, r.runtime_s);
  }
  std::printf("      slopes vs %s: L2u=%.4f L2v=%.4f Linf_u=%.4f Linf_v=%.4f\n", t.order_axis.c_str(),
              t.orders[0], t.orders[1], t.orders[2], t.orders[3]);
}

Outcome convergence_trig() {
  const auto t = mms::convergence_study(mms::trig_case(0.5, kParams), kSizes, 1.0,
                                        mms::default_sample_times(1.0));
  print_table(t);
  const bool ok = within(t.orders[0], 0.8, 1.2) && within(t.orders[1], 0.8, 1.2);
  return {ok, fmt("L∞(L²) slope vs h²: u %.4f, v %.4f (band [0.8, 1.2])", t.orders[0], t.orders[1])};
}

Outcome convergence_tanh() {
  const auto t = mms::convergence_study(mms::tanh_case({}, kParams), kSizes, 1.0,
                                        mms::default_sample_times(1.0));
  print_table(t);
  bool ok = true;
  for (double o : t.orders) ok = ok && within(o, 0.8, 1.2);
  return {ok, fmt("slopes vs h²: L2 u %.4f v %.4f, L∞ u %.4f v %.4f (band [0.8, 1.2])", t.orders[0],
                  t.orders[1], t.orders[2], t.orders[3])};
}

Outcome stability() {
  const auto t = mms::stability_study(mms::trig_case(0.5, kParams), 128, {1, 2, 4, 16, 32, 64}, 1.0,
                                      {0.5, 1.0});
  print_table(t);
  bool finite = true;
  for (const auto& r : t.rows) {
    finite = finite && r.finite && std::isfinite(r.err_l2_u) && std::isfinite(r.err_l2_v) &&
             std::isfinite(r.err_linf_u) && std::isfinite(r.err_linf_v);
  }
  const auto& k1 = t.rows.front();
  const auto& k64 = t.rows.back();
  const bool grows = k64.err_l2_u > k1.err_l2_u && k64.err_l2_v > k1.err_l2_v &&
                     k64.err_linf_u > k1.err_linf_u && k64.err_linf_v > k1.err_linf_v;
  return {finite && grows, fmt("all finite: %s; L∞(L²) u at k=64 %.3e vs k=1 %.3e", finite ? "yes" : "no",
                               k64.err_l2_u, k1.err_l2_u)};
}

Outcome interface() {
  const auto t = mms::interface_study(kParams, {0.2, 0.1, 0.05, 0.025}, 128, 1.0 / 256, 1.0,
                                      {0.25, 0.5, 0.75, 1.0});
  print_table(t);
  const bool ok = within(t.orders[0], 1.6, 2.4) && within(t.orders[1], 1.6, 2.4);
  return {ok, fmt("slope of log L∞(L²) error vs log eps: u %.4f, v %.4f (band [1.6, 2.4])",
                  t.orders[0], t.orders[1])};
}

patterns::PatternRun& bounded_run() {
  static patterns::PatternRun run = [] {
    patterns::PatternOptions opt;
    opt.dt = 1.0;
    opt.t_end = 200.0;
    return patterns::run_pattern(patterns::preset("labyrinthine"), kParams.d_u, kParams.d_v,
                                 unit_square(64), opt);
  }();
  return run;
}

Outcome bounds() {
  const auto& r = bounded_run().report;
  const bool ok = r.finite && r.min_u >= -1e-12 && r.max_u <= 1.0 + 1e-12 && r.min_v >= -1e-12;
  return {ok, fmt("%ld steps: min u %.3e, max u - 1 %.3e, min v %.3e", r.steps, r.min_u, r.max_u - 1.0,
                  r.min_v)};
}

Outcome energy() {
  const auto& r = bounded_run().report;
  const double area = 1.0;
  bool monotone = std::isfinite(r.dissipation.back());
  for (std::size_t i = 1; i < r.dissipation.size(); ++i) {
    monotone = monotone && r.dissipation[i] >= r.dissipation[i - 1];
  }
  const bool ok = r.max_mass_energy() <= 2.0 * area && monotone;
  return {ok, fmt("max(|u|²+|v|²) = %.6f <= %.1f; dissipation %.6f, monotone: %s", r.max_mass_energy(),
                  2.0 * area, r.dissipation.back(), monotone ? "yes" : "no")};
}

Outcome operator_oracle() {
  double worst_apply = 0.0, worst_asym = 0.0, min_eig = 1e300;
  bool llt_ok = true;
  for (int nx = 2; nx <= 8; ++nx) {
    for (int ny = 2; ny <= 8; ++ny) {
      const auto mesh = build_mesh(nx, ny, double(nx) / 8, double(ny) / 8);
      for (double dt : {1e-3, 1.0, 64.0}) {
        const double d = 1.6e-2;
        const ImplicitDiffusionOperator<double> op(mesh, d, dt);
        const Eigen::MatrixXd dense = testing::assemble_dense(*mesh, d, dt);
        for (Eigen::Index k = 0; k < mesh->num_cells(); ++k) {
          CellField<double> e(mesh);
          e[k] = 1.0;
          worst_apply = std::max(worst_apply, (op.apply(e).values() - dense.col(k)).lpNorm<Eigen::Infinity>());
        }
        worst_asym = std::max(worst_asym, (dense - dense.transpose()).lpNorm<Eigen::Infinity>());
        llt_ok = llt_ok && dense.llt().info() == Eigen::Success;
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
        min_eig = std::min(min_eig, eig.eigenvalues().minCoeff() / mesh->cell_area());
      }
    }
  }
  const bool ok = worst_apply <= 1e-12 && worst_asym == 0.0 && llt_ok && min_eig >= 1.0 - 1e-12;
  return {ok, fmt("max |apply - dense| %.2e, max asymmetry %.2e, Cholesky %s, min eig / h² %.6f",
                  worst_apply, worst_asym, llt_ok ? "ok" : "failed", min_eig)};
}

Outcome source_terms() {
  bool ok = true;
  std::string detail;
  const auto check = [&](const mms::ManufacturedCase& c, double t, std::vector<int> sizes) {
    mms::Defect prev{};
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const auto mesh = unit_square(sizes[i]);
      const auto d = mms::residual_check(c, t, *mesh, mesh->h() * mesh->h());
      std::printf("      %s nx=%-4d defect u %.4e v %.4e\n", c.label.c_str(), sizes[i], d.u, d.v);
      if (i > 0) {
        const double ru = prev.u / d.u, rv = prev.v / d.v;
        ok = ok && ru >= 3.5 && rv >= 3.5;
        detail += fmt("%s %d->%d: %.2f/%.2f; ", c.label.c_str(), sizes[i - 1], sizes[i], ru, rv);
      }
      prev = d;
    }
  };
  check(mms::trig_case(0.5, kParams), 0.3, {32, 64, 128});
  check(mms::tanh_case({}, kParams), 0.2, {128, 256, 512});
  return {ok, "defect ratios u/v per doubling (>= 3.5): " + detail};
}

Outcome fixed_point() {
  double worst = 0.0;
  for (auto [n, dt] : {std::pair{16, 0.01}, {64, 1.0}, {128, 0.5}, {32, 64.0 / 32}}) {
    const auto mesh = unit_square(n);
    SimState<double> s{0, 0.0, CellField<double>(mesh, 1.0), CellField<double>(mesh, 0.0)};
    RunConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 1000 * dt;
    cfg.monitor_energy = false;
    const auto r = run(s, default_params<double>(), cfg);
    if (r.report.steps != 1000) return {false, "wrong step count"};
    worst = std::max({worst, (r.final_state.u.values().array() - 1.0).abs().maxCoeff(),
                      r.final_state.v.values().cwiseAbs().maxCoeff()});
  }
  return {worst <= 1e-14, fmt("max L∞ drift after 1000 steps: %.3e (tolerance 1e-14)", worst)};
}

Outcome pattern_formation() {
  const auto mesh = unit_square(128);
  patterns::PatternOptions opt;
  opt.dt = 1.0;
  opt.t_end = 2000.0;
  const auto lab = patterns::preset("labyrinthine");
  const auto run = patterns::run_pattern(lab, kParams.d_u, kParams.d_v, mesh, opt);
  opt.unperturbed = true;
  const auto control = patterns::run_pattern(lab, kParams.d_u, kParams.d_v, mesh, opt);
  const double sd = patterns::spatial_std(run.snapshots.back().u);
  double control_sd = 0.0;
  for (const auto& s : control.snapshots) control_sd = std::max(control_sd, patterns::spatial_std(s.u));
  const bool ok = run.snapshots.back().t == 2000.0 && sd > 0.05 && control_sd < 1e-12;
  return {ok, fmt("std(u) at t=2000: %.4f (> 0.05); control max std %.3e (< 1e-12)", sd, control_sd)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"convergence order, trig case", convergence_trig},
      {"convergence order, tanh case (L2 and Linf)", convergence_tanh},
      {"stability for dt = k h", stability},
      {"interface sensitivity slope", interface},
      {"bound preservation", bounds},
      {"energy ledger", energy},
      {"operator vs dense oracle", operator_oracle},
      {"source-term defect order", source_terms},
      {"homogeneous fixed point", fixed_point},
      {"pattern formation", pattern_formation},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    std::printf("[%2d] %s\n", id, criteria[i].first);
    std::fflush(stdout);
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
