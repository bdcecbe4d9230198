#include "gsfv/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gsfv/io.hpp"
#include "gsfv/mms.hpp"
#include "gsfv/patterns.hpp"

namespace gsfv {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

/// Options shared by the subcommands. Flags override --config, which overrides these defaults.
struct Settings {
  std::string config_path;
  std::string out_dir;

  // simulate
  std::string preset = "labyrinthine";
  int nx = 128;
  double dt = 1.0;
  double t_end = 2000.0;
  bool control = false;

  // mms
  std::string case_name = "trig";
  std::vector<int> sizes{16, 32, 64, 128};
  std::vector<double> multipliers{1, 2, 4, 16, 32, 64};
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  std::vector<double> samples;
  double a = 0.5;
  double eps = 0.1;
  double r00 = 0.25;
  double amplitude = 0.25;
  double lambda = 2.0 * std::numbers::pi;
  std::string geometry = "consistent";
  double t = 0.3;
  double cg_tol = 1e-10;
};

/// Copies JSON config values into settings for every option absent from the command line.
void apply_config(const json& cfg, CLI::App& app, Settings& s) {
  const auto take = [&](const char* key, const char* flag, auto& target) {
    if (!cfg.contains(key)) return;
    CLI::Option* opt = app.get_option_no_throw(flag);
    if (opt != nullptr && opt->count() > 0) return;
    cfg.at(key).get_to(target);
  };
  take("preset", "--preset", s.preset);
  take("nx", "--nx", s.nx);
  take("dt", "--dt", s.dt);
  take("t_end", "--t-end", s.t_end);
  take("case", "--case", s.case_name);
  take("sizes", "--sizes", s.sizes);
  take("multipliers", "--multipliers", s.multipliers);
  take("eps_list", "--eps", s.eps_list);
  take("samples", "--samples", s.samples);
  take("a", "--a", s.a);
  take("eps", "--eps", s.eps);
  take("r00", "--r00", s.r00);
  take("amplitude", "--amplitude", s.amplitude);
  take("lambda", "--lambda", s.lambda);
  take("geometry", "--geometry", s.geometry);
  take("t", "--t", s.t);
  take("cg_tol", "--cg-tol", s.cg_tol);
  take("out", "--out", s.out_dir);
}

mms::ManufacturedCase make_case(const Settings& s) {
  const auto params = default_params<double>();
  if (s.case_name == "trig") return mms::trig_case(s.a, params);
  if (s.case_name == "tanh") {
    mms::TanhOptions o;
    o.eps = s.eps;
    o.r00 = s.r00;
    o.amplitude = s.amplitude;
    o.lambda = s.lambda;
    if (s.geometry == "paper") {
      o.geometry = mms::TanhGeometry::PaperLiteral;
    } else if (s.geometry != "consistent") {
      throw DomainError("--geometry must be 'consistent' or 'paper'");
    }
    return mms::tanh_case(o, params);
  }
  throw DomainError("--case must be 'trig' or 'tanh'");
}

json table_json(const mms::ErrorTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{table.key_name, r.key}, {"h", r.h}, {"dt", r.dt}, {"steps", r.steps},
                    {"finite", r.finite}, {"err_Linf_L2_u", r.err_l2_u},
                    {"err_Linf_L2_v", r.err_l2_v}, {"err_Linf_Linf_u", r.err_linf_u},
                    {"err_Linf_Linf_v", r.err_linf_v}});
  }
  return {{"order_axis", table.order_axis}, {"orders", table.orders}, {"rows", rows},
          {"metadata", table.metadata}};
}

json base_manifest(const std::string& command, const Settings& s) {
  return {{"tool", "gsfv"},
          {"version", kVersion},
          {"command", command},
          {"config_file", s.config_path},
          {"started_utc", utc_now()},
          {"params", {{"d_u", 1.6e-5}, {"d_v", 0.8e-5}}},
          {"cg_tolerance", s.cg_tol}};
}

void write_manifest(const fs::path& dir, json manifest) {
  manifest["finished_utc"] = utc_now();
  io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

fs::path prepare_out_dir(const Settings& s) {
  if (s.out_dir.empty()) throw DomainError("--out is required");
  std::error_code ec;
  fs::create_directories(s.out_dir, ec);
  if (ec) throw IoFailure("cannot create " + s.out_dir + ": " + ec.message());
  return s.out_dir;
}

std::string time_tag(double t) {
  std::ostringstream s;
  s << std::setprecision(12) << t;
  return s.str();
}

int cmd_presets(std::ostream& out) {
  for (const auto& p : patterns::all_presets()) {
    out << p.name << " F=" << std::fixed << std::setprecision(3) << p.feed << " k=" << p.kill
        << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const Settings& s, std::ostream& out) {
  const auto p = patterns::preset(s.preset);
  const fs::path dir = prepare_out_dir(s);
  const auto mesh = unit_square(s.nx);
  const auto params = default_params<double>(p.feed, p.kill);

  patterns::PatternOptions options;
  options.dt = s.dt;
  options.t_end = s.t_end;
  options.unperturbed = s.control;
  options.cg.tolerance = s.cg_tol;

  json manifest = base_manifest("simulate", s);
  manifest["preset"] = {{"name", p.name}, {"F", p.feed}, {"k", p.kill}};
  manifest["mesh"] = {{"nx", s.nx}, {"ny", s.nx}, {"h", mesh->h()}, {"domain", {1.0, 1.0}}};
  manifest["dt"] = s.dt;
  manifest["t_end"] = s.t_end;
  manifest["control"] = s.control;

  const auto run = patterns::run_pattern(p, params.d_u, params.d_v, mesh, options);
  json files = json::array();
  for (const auto& snap : run.snapshots) {
    const std::string tag = time_tag(snap.t);
    const std::string pgm = "u_t" + tag + ".pgm";
    const std::string ucsv = "u_t" + tag + ".csv";
    const std::string vcsv = "v_t" + tag + ".csv";
    io::write_field_snapshot(snap.u, dir / pgm, io::SnapshotFormat::Pgm);
    io::write_field_snapshot(snap.u, dir / ucsv, io::SnapshotFormat::Csv);
    io::write_field_snapshot(snap.v, dir / vcsv, io::SnapshotFormat::Csv);
    files.push_back({{"t", snap.t}, {"u_pgm", pgm}, {"u_csv", ucsv}, {"v_csv", vcsv},
                     {"u_std", patterns::spatial_std(snap.u)}});
  }
  const auto& r = run.report;
  manifest["snapshots"] = files;
  manifest["monitor"] = {{"steps", r.steps},
                         {"finite", r.finite},
                         {"min_u", r.min_u},
                         {"max_u", r.max_u},
                         {"min_v", r.min_v},
                         {"max_v", r.max_v},
                         {"bound_violations", r.bound_violations},
                         {"first_violation_step", r.first_violation_step},
                         {"max_mass_energy", r.max_mass_energy()},
                         {"dissipation", r.dissipation.empty() ? 0.0 : r.dissipation.back()},
                         {"cg_iterations", r.total_cg_iterations}};
  write_manifest(dir, manifest);

  out << "simulated " << p.name << " to t=" << s.t_end << " in " << r.steps << " steps; u in ["
      << r.min_u << ", " << r.max_u << "], v in [" << r.min_v << ", " << r.max_v << "], "
      << r.bound_violations << " bound violations\n";
  return r.finite ? kExitOk : kExitNumerical;
}

int finish_study(const std::string& name, const mms::ErrorTable& table, const Settings& s,
                 json manifest, std::ostream& out) {
  const fs::path dir = prepare_out_dir(s);
  const std::string csv = name + "_" + (table.metadata.count("case") ? table.metadata.at("case") : "") + ".csv";
  io::write_error_table(table, dir / csv);
  manifest["table"] = csv;
  manifest["result"] = table_json(table);
  write_manifest(dir, manifest);
  out << io::format_error_table(table);
  for (const auto& r : table.rows) {
    if (!r.finite) return kExitNumerical;
  }
  return kExitOk;
}

int cmd_convergence(const Settings& s, std::ostream& out) {
  const auto mcase = make_case(s);
  const auto samples = s.samples.empty() ? mms::default_sample_times(s.t_end) : s.samples;
  const auto table = mms::convergence_study(mcase, s.sizes, s.t_end, samples);
  json manifest = base_manifest("mms convergence", s);
  manifest["case"] = s.case_name;
  manifest["sizes"] = s.sizes;
  manifest["t_end"] = s.t_end;
  manifest["sample_times"] = samples;
  return finish_study("convergence", table, s, manifest, out);
}

int cmd_stability(const Settings& s, std::ostream& out) {
  const auto mcase = make_case(s);
  const auto samples = s.samples.empty() ? std::vector<double>{s.t_end / 2, s.t_end} : s.samples;
  const auto table = mms::stability_study(mcase, s.nx, s.multipliers, s.t_end, samples);
  json manifest = base_manifest("mms stability", s);
  manifest["case"] = s.case_name;
  manifest["nx"] = s.nx;
  manifest["multipliers"] = s.multipliers;
  manifest["t_end"] = s.t_end;
  manifest["sample_times"] = samples;
  return finish_study("stability", table, s, manifest, out);
}

int cmd_interface(const Settings& s, std::ostream& out) {
  const auto samples = s.samples.empty()
                           ? std::vector<double>{s.t_end / 4, s.t_end / 2, 3 * s.t_end / 4, s.t_end}
                           : s.samples;
  mms::TanhOptions base;
  base.r00 = s.r00;
  base.amplitude = s.amplitude;
  base.lambda = s.lambda;
  if (s.geometry == "paper") base.geometry = mms::TanhGeometry::PaperLiteral;
  const auto table = mms::interface_study(default_params<double>(), s.eps_list, s.nx, s.dt,
                                          s.t_end, samples, base);
  json manifest = base_manifest("mms interface", s);
  manifest["eps"] = s.eps_list;
  manifest["nx"] = s.nx;
  manifest["dt"] = s.dt;
  manifest["t_end"] = s.t_end;
  manifest["sample_times"] = samples;
  return finish_study("interface", table, s, manifest, out);
}

int cmd_residual(const Settings& s, std::ostream& out) {
  const auto mcase = make_case(s);
  // The tanh interface is ~eps/(2π) wide; coarser grids are pre-asymptotic.
  const int middle = s.nx > 0 ? s.nx : (s.case_name == "tanh" ? 256 : 64);
  out << "case " << mcase.label << " at t=" << s.t << " (dt_fd = h^2)\n";
  out << "nx,defect_u,defect_v\n";
  mms::Defect previous{};
  for (int n : {middle / 2, middle, 2 * middle}) {
    const auto mesh = unit_square(n);
    const auto d = mms::residual_check(mcase, s.t, *mesh, mesh->h() * mesh->h());
    out << n << ',' << std::setprecision(6) << d.u << ',' << d.v;
    if (n != middle / 2) out << "  ratio " << previous.u / d.u << ' ' << previous.v / d.v;
    out << '\n';
    previous = d;
  }
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-volume IMEX solver for the Gray-Scott system", "gsfv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Settings s;
  app.add_option("--config", s.config_path, "JSON config; command-line flags take precedence")
      ->check(CLI::ExistingFile);

  auto* presets = app.add_subcommand("presets", "List pattern presets with (F, k)");

  auto* simulate = app.add_subcommand("simulate", "Pattern run with snapshots and a manifest");
  simulate->add_option("--preset", s.preset, "labyrinthine | moving_spots | pulsating_spots");
  simulate->add_option("--nx", s.nx, "Cells per side of the unit square");
  simulate->add_option("--dt", s.dt, "Time step");
  simulate->add_option("--t-end", s.t_end, "Terminal time");
  simulate->add_option("--out", s.out_dir, "Output directory");
  simulate->add_option("--cg-tol", s.cg_tol, "CG relative residual tolerance");
  simulate->add_flag("--control", s.control, "Start from the homogeneous state (1, 0)");

  auto* mms_cmd = app.add_subcommand("mms", "Manufactured-solution studies");
  mms_cmd->require_subcommand(1);
  const auto add_case_options = [&](CLI::App* sub) {
    sub->add_option("--case", s.case_name, "trig | tanh");
    sub->add_option("--a", s.a, "Amplitude of the trig case, in (0, 1)");
    sub->add_option("--eps", s.eps, "Interface thickness of the tanh case");
    sub->add_option("--r00", s.r00, "Baseline radius of the tanh case");
    sub->add_option("--amplitude", s.amplitude, "Radius oscillation amplitude of the tanh case");
    sub->add_option("--lambda", s.lambda, "Radius angular frequency of the tanh case");
    sub->add_option("--geometry", s.geometry, "consistent | paper level-set field for tanh");
  };
  auto* convergence = mms_cmd->add_subcommand("convergence", "Error vs mesh size with dt ~ h^2");
  add_case_options(convergence);
  convergence->add_option("--sizes", s.sizes, "Ascending cells per side")->delimiter(',');
  convergence->add_option("--t-end", s.t_end, "Terminal time")->default_val(1.0);
  convergence->add_option("--samples", s.samples, "Sample times (default T/10..T)")->delimiter(',');
  convergence->add_option("--out", s.out_dir, "Output directory");

  auto* stability = mms_cmd->add_subcommand("stability", "Error vs dt = k h at fixed h");
  add_case_options(stability);
  stability->add_option("--nx", s.nx, "Cells per side");
  stability->add_option("--multipliers", s.multipliers, "Step multipliers k")->delimiter(',');
  stability->add_option("--t-end", s.t_end, "Terminal time")->default_val(1.0);
  stability->add_option("--samples", s.samples, "Sample times (default T/2, T)")->delimiter(',');
  stability->add_option("--out", s.out_dir, "Output directory");

  auto* interface = mms_cmd->add_subcommand("interface", "tanh error vs interface thickness");
  interface->add_option("--eps", s.eps_list, "Descending thicknesses")->delimiter(',');
  interface->add_option("--nx", s.nx, "Cells per side");
  interface->add_option("--dt", s.dt, "Time step")->default_val(1.0 / 256.0);
  interface->add_option("--t-end", s.t_end, "Terminal time")->default_val(1.0);
  interface->add_option("--samples", s.samples, "Sample times (default quarters of T)")->delimiter(',');
  interface->add_option("--geometry", s.geometry, "consistent | paper level-set field");
  interface->add_option("--out", s.out_dir, "Output directory");

  auto* residual = mms_cmd->add_subcommand("residual", "Finite-difference defect of the sources");
  add_case_options(residual);
  residual->add_option("--nx", s.nx, "Middle of three grids (nx/2, nx, 2nx); default 64 trig, 256 tanh")
      ->default_val(0);
  residual->add_option("--t", s.t, "Evaluation time")->default_val(0.3);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!s.config_path.empty()) {
      std::ifstream in(s.config_path);
      if (!in) throw IoFailure("cannot read config " + s.config_path);
      const json cfg = json::parse(in);
      for (auto* sub : {simulate, convergence, stability, interface, residual}) {
        if (sub->parsed()) apply_config(cfg, *sub, s);
      }
    }
    if (presets->parsed()) return cmd_presets(out);
    if (simulate->parsed()) return cmd_simulate(s, out);
    if (convergence->parsed()) return cmd_convergence(s, out);
    if (stability->parsed()) return cmd_stability(s, out);
    if (interface->parsed()) return cmd_interface(s, out);
    if (residual->parsed()) return cmd_residual(s, out);
  } catch (const IoFailure& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NoConvergence& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const StepFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace gsfv
