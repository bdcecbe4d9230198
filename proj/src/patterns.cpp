#include "gsfv/patterns.hpp"

#include <algorithm>
#include <cmath>

namespace gsfv::patterns {

const std::vector<PatternPreset>& all_presets() {
  static const std::vector<PatternPreset> presets{
      {"labyrinthine", 0.037, 0.060, {100, 500, 1000, 2000}},
      {"moving_spots", 0.014, 0.054, {100, 500, 1000, 2000}},
      {"pulsating_spots", 0.025, 0.060, {100, 500, 1000, 2000}},
  };
  return presets;
}

PatternPreset preset(std::string_view name) {
  for (const auto& p : all_presets()) {
    if (p.name == name) return p;
  }
  throw UnknownPreset("unknown preset '" + std::string(name) +
                      "' (expected labyrinthine, moving_spots or pulsating_spots)");
}

std::pair<CellField<double>, CellField<double>> pattern_initial_condition(const MeshPtr<double>& mesh) {
  CellField<double> u(mesh, 1.0);
  CellField<double> v(mesh, 0.0);
  const auto inside = [](double s) { return s >= 0.4 && s <= 0.6; };
  for (Eigen::Index k = 0; k < mesh->num_cells(); ++k) {
    const auto c = mesh->cell_center(k);
    if (inside(c.x()) && inside(c.y())) {
      u[k] = 0.5;
      v[k] = 0.25;
    }
  }
  return {std::move(u), std::move(v)};
}

std::vector<double> snapshot_schedule(const PatternPreset& p, double t_end) {
  std::vector<double> times;
  for (double t : p.snapshot_times) {
    if (t < t_end) times.push_back(t);
  }
  times.push_back(t_end);
  return times;
}

PatternRun run_pattern(const PatternPreset& p, double d_u, double d_v, const MeshPtr<double>& mesh,
                       const PatternOptions& options, const std::vector<Observer<double>>& observers) {
  const GrayScottParams<double> params{d_u, d_v, p.feed, p.kill};
  params.validate();

  PatternRun out;
  out.snapshot_times = snapshot_schedule(p, options.t_end);
  std::vector<long> snapshot_steps;
  for (double t : out.snapshot_times) {
    const double ratio = t / options.dt;
    const long n = std::lround(ratio);
    if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio) {
      throw SampleTimeUnreachable("snapshot time " + std::to_string(t) +
                                  " is not a whole number of steps of " + std::to_string(options.dt));
    }
    snapshot_steps.push_back(n);
  }

  SimState<double> initial{0, 0.0, CellField<double>(mesh, 1.0), CellField<double>(mesh, 0.0)};
  if (!options.unperturbed) {
    auto [u0, v0] = pattern_initial_condition(mesh);
    initial.u = std::move(u0);
    initial.v = std::move(v0);
  }

  std::vector<Observer<double>> all = observers;
  all.emplace_back([&](const SimState<double>& s) {
    if (std::find(snapshot_steps.begin(), snapshot_steps.end(), s.n) != snapshot_steps.end()) {
      out.snapshots.push_back({s.t, s.u, s.v});
    }
  });

  RunConfig config;
  config.dt = options.dt;
  config.t_end = options.t_end;
  config.cg = options.cg;
  auto result = run(initial, params, config, nullptr, all);
  out.report = std::move(result.report);
  return out;
}

double spatial_std(const CellField<double>& field) {
  const auto& x = field.values();
  const double mean = x.mean();
  return std::sqrt((x.array() - mean).square().mean());
}

}  // namespace gsfv::patterns
