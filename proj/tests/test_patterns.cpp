#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gsfv/patterns.hpp"

using namespace gsfv;
using namespace gsfv::patterns;

TEST_CASE("presets") {
  const auto lab = preset("labyrinthine");
  CHECK(lab.feed == 0.037);
  CHECK(lab.kill == 0.060);
  const auto moving = preset("moving_spots");
  CHECK(moving.feed == 0.014);
  CHECK(moving.kill == 0.054);
  const auto pulsing = preset("pulsating_spots");
  CHECK(pulsing.feed == 0.025);
  CHECK(pulsing.kill == 0.060);
  CHECK(lab.snapshot_times == std::vector<double>{100, 500, 1000, 2000});
  CHECK_THROWS_AS(preset("stripes"), UnknownPreset);
  CHECK(all_presets().size() == 3);
}

TEST_CASE("initial condition flags cells by center") {
  const auto mesh = unit_square(10);
  auto [u, v] = pattern_initial_condition(mesh);
  int flagged = 0;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    if (u[k] != 1.0) {
      ++flagged;
      CHECK(u[k] == 0.5);
      CHECK(v[k] == 0.25);
    } else {
      CHECK(v[k] == 0.0);
    }
  }
  CHECK(flagged == 4);
  CHECK(u.values().mean() == doctest::Approx(0.98).epsilon(1e-15));
  CHECK(u[0] == 1.0);
  CHECK(v[0] == 0.0);
}

TEST_CASE("snapshot schedule") {
  const auto lab = preset("labyrinthine");
  CHECK(snapshot_schedule(lab, 10.0) == std::vector<double>{10.0});
  CHECK(snapshot_schedule(lab, 600.0) == std::vector<double>{100.0, 500.0, 600.0});
  CHECK(snapshot_schedule(lab, 2000.0) == std::vector<double>{100.0, 500.0, 1000.0, 2000.0});
}

TEST_CASE("short smoke run keeps bounds and is reproducible") {
  const auto mesh = unit_square(64);
  PatternOptions opt;
  opt.dt = 0.5;
  opt.t_end = 10.0;
  const auto a = run_pattern(preset("labyrinthine"), 1.6e-5, 0.8e-5, mesh, opt);
  const auto b = run_pattern(preset("labyrinthine"), 1.6e-5, 0.8e-5, mesh, opt);
  CHECK(a.report.finite);
  CHECK(a.report.bound_violations == 0);
  CHECK(a.report.steps == 20);
  REQUIRE(a.snapshots.size() == 1);
  CHECK(a.snapshots[0].t == 10.0);
  CHECK(a.snapshots[0].u.is_finite());
  CHECK((a.snapshots[0].u.values().array() == b.snapshots[0].u.values().array()).all());
  CHECK((a.snapshots[0].v.values().array() == b.snapshots[0].v.values().array()).all());
}

TEST_CASE("unperturbed control stays homogeneous") {
  const auto mesh = unit_square(32);
  PatternOptions opt;
  opt.t_end = 200.0;
  opt.unperturbed = true;
  for (const auto& p : all_presets()) {
    const auto r = run_pattern(p, 1.6e-5, 0.8e-5, mesh, opt);
    for (const auto& s : r.snapshots) {
      CHECK((s.u.values().array() - 1.0).abs().maxCoeff() <= 1e-12);
      CHECK(s.v.values().cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("all presets respect the bounds at dt = 1") {
  const auto mesh = unit_square(32);
  PatternOptions opt;
  opt.t_end = 300.0;
  for (const auto& p : all_presets()) {
    CAPTURE(p.name);
    const auto r = run_pattern(p, 1.6e-5, 0.8e-5, mesh, opt);
    CHECK(r.report.bound_violations == 0);
    CHECK(r.report.min_u >= -1e-12);
    CHECK(r.report.max_v <= 1.0 + 1e-12);
  }
}

TEST_CASE("snapshot times must be reachable") {
  PatternOptions opt;
  opt.dt = 0.3;
  opt.t_end = 10.0;
  CHECK_THROWS_AS(run_pattern(preset("labyrinthine"), 1.6e-5, 0.8e-5, unit_square(8), opt),
                  SampleTimeUnreachable);
}

TEST_CASE("spatial_std") {
  const auto mesh = unit_square(2);
  CellField<double> f(mesh);
  f.values() << 0, 1, 0, 1;
  CHECK(spatial_std(f) == 0.5);
  CHECK(spatial_std(CellField<double>(mesh, 3.0)) == 0.0);
}
