#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gsfv/imex.hpp"

namespace gsfv::patterns {

struct PatternPreset {
  std::string name;
  double feed;
  double kill;
  std::vector<double> snapshot_times;
};

/// labyrinthine (0.037, 0.060), moving_spots (0.014, 0.054), pulsating_spots (0.025, 0.060).
const std::vector<PatternPreset>& all_presets();

/// Throws UnknownPreset for any other name.
PatternPreset preset(std::string_view name);

/// u = 1, v = 0 except cells whose centers lie in [0.4, 0.6]², which get u = 0.5, v = 0.25.
std::pair<CellField<double>, CellField<double>> pattern_initial_condition(const MeshPtr<double>& mesh);

struct Snapshot {
  double t;
  CellField<double> u;
  CellField<double> v;
};

struct PatternOptions {
  double dt = 1.0;
  double t_end = 2000.0;
  bool unperturbed = false;  ///< control run from the homogeneous state (1, 0)
  CgOptions cg{};
};

struct PatternRun {
  std::vector<Snapshot> snapshots;
  MonitorReport<double> report;
  std::vector<double> snapshot_times;
};

/// Snapshot times of a run: the preset times not beyond t_end, plus t_end itself.
std::vector<double> snapshot_schedule(const PatternPreset& p, double t_end);

/// Long-horizon source-free run with bound and energy monitors on.
PatternRun run_pattern(const PatternPreset& p, double d_u, double d_v, const MeshPtr<double>& mesh,
                       const PatternOptions& options,
                       const std::vector<Observer<double>>& observers = {});

/// Population standard deviation of the cell values.
double spatial_std(const CellField<double>& field);

}  // namespace gsfv::patterns
