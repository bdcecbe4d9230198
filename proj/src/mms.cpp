#include "gsfv/mms.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace gsfv::mms {

namespace {

constexpr double kPi = std::numbers::pi;

double sech2(double z) {
  const double c = std::cosh(z);
  return 1.0 / (c * c);
}

void require_params(const Params& p) { p.validate(); }

/// Evaluates rows [0, n) on up to worker_count() threads; output order follows input order.
template <typename Fn>
std::vector<ErrorRow> run_rows(std::size_t n, Fn&& make_row) {
  std::vector<ErrorRow> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        rows[i] = make_row(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(worker_count(), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void fill_orders(ErrorTable& table, const std::vector<double>& axis) {
  const auto column = [&](auto member) {
    std::vector<double> y;
    for (const auto& r : table.rows) y.push_back(r.*member);
    return y;
  };
  table.orders = {fit_loglog_slope(axis, column(&ErrorRow::err_l2_u)),
                  fit_loglog_slope(axis, column(&ErrorRow::err_l2_v)),
                  fit_loglog_slope(axis, column(&ErrorRow::err_linf_u)),
                  fit_loglog_slope(axis, column(&ErrorRow::err_linf_v))};
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (double x : xs) {
    if (!out.empty()) out += ' ';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    out += buf;
  }
  return out;
}

}  // namespace

ManufacturedCase trig_case(double a, const Params& params) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("trig case amplitude a must lie in (0, 1)");
  require_params(params);
  const double alpha = 2.0 * kPi;
  const double omega = 2.0 * kPi;
  const auto shape = [alpha](double x, double y) { return std::cos(alpha * x) * std::cos(alpha * y); };

  ManufacturedCase c;
  c.label = "trig";
  c.params = params;
  c.u_star = [=](double t, double x, double y) { return 1.0 - a * shape(x, y) * std::cos(omega * t); };
  c.v_star = [=](double t, double x, double y) { return 0.25 + 0.25 * shape(x, y) * std::cos(omega * t); };
  c.s_u = [=](double t, double x, double y) {
    const double cxy = shape(x, y);
    const double ct = std::cos(omega * t);
    const double u = 1.0 - a * cxy * ct;
    const double v = 0.25 + 0.25 * cxy * ct;
    return a * omega * cxy * std::sin(omega * t) - 2.0 * a * params.d_u * alpha * alpha * cxy * ct -
           (params.feed * (1.0 - u) - u * v * v);
  };
  c.s_v = [=](double t, double x, double y) {
    const double cxy = shape(x, y);
    const double ct = std::cos(omega * t);
    const double u = 1.0 - a * cxy * ct;
    const double v = 0.25 + 0.25 * cxy * ct;
    return -0.25 * omega * cxy * std::sin(omega * t) + 0.5 * params.d_v * alpha * alpha * cxy * ct -
           (-(params.feed + params.kill) * v + u * v * v);
  };
  return c;
}

ManufacturedCase tanh_case(const TanhOptions& o, const Params& params) {
  if (!(o.eps > 0.0)) throw DomainError("interface thickness eps must be positive");
  require_params(params);

  // r, |∇r|², Δr for the selected level-set field.
  struct Geometry {
    double r, grad2, lap;
  };
  const bool literal = o.geometry == TanhGeometry::PaperLiteral;
  const auto geometry = [literal](double x, double y) -> Geometry {
    if (literal) {
      const double sx = std::sin(kPi * x), sy = std::sin(kPi * y);
      const double r = std::cos(kPi * x) + std::cos(kPi * y);
      return {r, kPi * kPi * (sx * sx + sy * sy), -kPi * kPi * r};
    }
    const double px = 2.0 * kPi * (x - 0.5), py = 2.0 * kPi * (y - 0.5);
    const double sx = std::sin(px), sy = std::sin(py);
    const double r = std::cos(px) + std::cos(py);
    return {r, 4.0 * kPi * kPi * (sx * sx + sy * sy), -4.0 * kPi * kPi * r};
  };
  const auto radius = [o](double t) { return o.r00 + o.amplitude * std::sin(o.lambda * t); };
  const auto radius_rate = [o](double t) { return o.amplitude * o.lambda * std::cos(o.lambda * t); };
  const double eps = o.eps;

  ManufacturedCase c;
  c.label = "tanh";
  c.params = params;
  c.u_star = [=](double t, double x, double y) {
    return 0.5 * (1.0 + std::tanh((radius(t) - geometry(x, y).r) / eps));
  };
  c.v_star = [u = c.u_star](double t, double x, double y) { return 1.0 - u(t, x, y); };

  // With z = s/ε: ∂t u* = ṙ0 sech²z / (2ε),
  // Δu* = −|∇r|² sech²z tanh z / ε² − Δr sech²z / (2ε).
  struct Derivs {
    double u, dt_u, lap_u;
  };
  const auto derivs = [=](double t, double x, double y) -> Derivs {
    const Geometry g = geometry(x, y);
    const double z = (radius(t) - g.r) / eps;
    const double s2 = sech2(z);
    const double th = std::tanh(z);
    return {0.5 * (1.0 + th), radius_rate(t) * s2 / (2.0 * eps),
            -g.grad2 * s2 * th / (eps * eps) - g.lap * s2 / (2.0 * eps)};
  };
  c.s_u = [=](double t, double x, double y) {
    const Derivs d = derivs(t, x, y);
    const double u = d.u, v = 1.0 - d.u;
    return d.dt_u - params.d_u * d.lap_u - (params.feed * (1.0 - u) - u * v * v);
  };
  c.s_v = [=](double t, double x, double y) {
    const Derivs d = derivs(t, x, y);
    const double u = d.u, v = 1.0 - d.u;
    return -d.dt_u + params.d_v * d.lap_u - (-(params.feed + params.kill) * v + u * v * v);
  };
  return c;
}

ManufacturedCase steady_case(const Params& params) {
  require_params(params);
  ManufacturedCase c;
  c.label = "steady";
  c.params = params;
  c.u_star = [](double, double, double) { return 1.0; };
  c.v_star = [](double, double, double) { return 0.0; };
  c.s_u = [](double, double, double) { return 0.0; };
  c.s_v = [](double, double, double) { return 0.0; };
  return c;
}

Defect residual_check(const ManufacturedCase& mc, double t, const UniformMesh<double>& mesh,
                      double dt_fd) {
  if (!(dt_fd > 0.0) || t - dt_fd < 0.0) {
    throw DomainError("residual check needs dt_fd > 0 and t - dt_fd >= 0");
  }
  const double h = mesh.h();
  const auto& p = mc.params;
  const auto lap = [h](const SpaceTimeFn& f, double t, double x, double y) {
    return (f(t, x + h, y) + f(t, x - h, y) + f(t, x, y + h) + f(t, x, y - h) - 4.0 * f(t, x, y)) /
           (h * h);
  };
  const auto ddt = [dt_fd](const SpaceTimeFn& f, double t, double x, double y) {
    return (f(t + dt_fd, x, y) - f(t - dt_fd, x, y)) / (2.0 * dt_fd);
  };
  Defect worst{0.0, 0.0};
  for (Eigen::Index k = 0; k < mesh.num_cells(); ++k) {
    const auto c = mesh.cell_center(k);
    const double x = c.x(), y = c.y();
    const double u = mc.u_star(t, x, y);
    const double v = mc.v_star(t, x, y);
    const double du = ddt(mc.u_star, t, x, y) - p.d_u * lap(mc.u_star, t, x, y) -
                      reaction_f(u, v, p.feed) - mc.s_u(t, x, y);
    const double dv = ddt(mc.v_star, t, x, y) - p.d_v * lap(mc.v_star, t, x, y) -
                      reaction_g(u, v, p.feed, p.kill) - mc.s_v(t, x, y);
    worst.u = std::max(worst.u, std::abs(du));
    worst.v = std::max(worst.v, std::abs(dv));
  }
  return worst;
}

std::vector<double> default_sample_times(double t_end) {
  std::vector<double> out;
  for (int i = 1; i <= 10; ++i) out.push_back(t_end * i / 10.0);
  return out;
}

double convergence_dt(double h, double sample_spacing) {
  const double steps = std::ceil(sample_spacing / (h * h) * (1.0 - 1e-12));
  return sample_spacing / steps;
}

ErrorRow error_norms(const ManufacturedCase& mc, const MeshPtr<double>& mesh, double dt,
                     double t_end, const std::vector<double>& sample_times, const CgOptions& cg) {
  if (sample_times.empty()) throw SampleTimeUnreachable("no sample times given");
  std::vector<long> sample_steps;
  for (double ts : sample_times) {
    const double ratio = ts / dt;
    const long n = std::lround(ratio);
    if (!(ts > 0.0) || ts > t_end * (1.0 + 1e-12) || n < 1 ||
        std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio) {
      throw SampleTimeUnreachable("sample time " + std::to_string(ts) +
                                  " is not a whole number of steps of " + std::to_string(dt) +
                                  " within (0, " + std::to_string(t_end) + "]");
    }
    sample_steps.push_back(n);
  }

  const auto start = std::chrono::steady_clock::now();
  SimState<double> initial{0, 0.0,
                           project(mesh, [&](double x, double y) { return mc.u_star(0.0, x, y); },
                                   Quadrature::Gauss3),
                           project(mesh, [&](double x, double y) { return mc.v_star(0.0, x, y); },
                                   Quadrature::Gauss3)};

  ErrorRow row;
  row.h = mesh->h();
  row.dt = dt;
  Observer<double> sampler = [&](const SimState<double>& s) {
    if (std::find(sample_steps.begin(), sample_steps.end(), s.n) == sample_steps.end()) return;
    const auto exact_u = project(mesh, [&](double x, double y) { return mc.u_star(s.t, x, y); },
                                 Quadrature::Gauss3);
    const auto exact_v = project(mesh, [&](double x, double y) { return mc.v_star(s.t, x, y); },
                                 Quadrature::Gauss3);
    const auto eu = s.u - exact_u;
    const auto ev = s.v - exact_v;
    row.err_l2_u = std::max(row.err_l2_u, norm_l2_h(eu));
    row.err_l2_v = std::max(row.err_l2_v, norm_l2_h(ev));
    row.err_linf_u = std::max(row.err_linf_u, norm_linf(eu));
    row.err_linf_v = std::max(row.err_linf_v, norm_linf(ev));
  };

  RunConfig config;
  config.dt = dt;
  config.t_end = t_end;
  config.monitor_bounds = false;
  config.monitor_energy = false;
  config.cg = cg;
  const auto sources = mc.sources();
  const auto result = run(initial, mc.params, config, &sources, {sampler});

  row.steps = result.report.steps;
  row.finite = result.report.finite;
  if (!row.finite) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.err_l2_u = row.err_l2_v = row.err_linf_u = row.err_linf_v = nan;
  }
  row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("slope fit needs at least two matching points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ErrorTable convergence_study(const ManufacturedCase& mc, const std::vector<int>& sizes,
                             double t_end, const std::vector<double>& sample_times) {
  if (sizes.size() < 2 || !std::is_sorted(sizes.begin(), sizes.end())) {
    throw DomainError("convergence study needs at least two ascending mesh sizes");
  }
  const double spacing = sample_times.front();
  ErrorTable table;
  table.key_name = "nx";
  table.order_axis = "h^2";
  table.rows = run_rows(sizes.size(), [&](std::size_t i) {
    const auto mesh = unit_square(sizes[i]);
    auto row = error_norms(mc, mesh, convergence_dt(mesh->h(), spacing), t_end, sample_times);
    row.key = sizes[i];
    return row;
  });
  std::vector<double> volumes;
  for (const auto& r : table.rows) volumes.push_back(r.h * r.h);
  fill_orders(table, volumes);
  table.metadata = {{"study", "convergence"}, {"case", mc.label},
                    {"t_end", std::to_string(t_end)}, {"sample_times", join(sample_times)},
                    {"dt_rule", "largest dt <= h^2 dividing the sample spacing"}};
  return table;
}

ErrorTable stability_study(const ManufacturedCase& mc, int nx, const std::vector<double>& multipliers,
                           double t_end, const std::vector<double>& sample_times) {
  if (multipliers.empty()) throw DomainError("stability study needs multipliers");
  for (double k : multipliers) {
    if (!(k > 0)) throw DomainError("stability multipliers must be positive");
  }
  const auto mesh = unit_square(nx);
  ErrorTable table;
  table.key_name = "k";
  table.order_axis = "dt";
  table.rows = run_rows(multipliers.size(), [&](std::size_t i) {
    auto row = error_norms(mc, mesh, multipliers[i] * mesh->h(), t_end, sample_times);
    row.key = multipliers[i];
    return row;
  });
  std::vector<double> dts;
  for (const auto& r : table.rows) dts.push_back(r.dt);
  if (multipliers.size() >= 2) fill_orders(table, dts);
  table.metadata = {{"study", "stability"}, {"case", mc.label}, {"nx", std::to_string(nx)},
                    {"t_end", std::to_string(t_end)}, {"sample_times", join(sample_times)}};
  return table;
}

ErrorTable interface_study(const Params& params, const std::vector<double>& eps_list, int nx,
                           double dt, double t_end, const std::vector<double>& sample_times,
                           const TanhOptions& base) {
  if (eps_list.size() < 2 || !std::is_sorted(eps_list.rbegin(), eps_list.rend())) {
    throw DomainError("interface study needs at least two descending eps values");
  }
  const auto mesh = unit_square(nx);
  for (double eps : eps_list) {
    if (!(eps > 2.0 * mesh->h())) {
      throw UnresolvableInterface("eps = " + std::to_string(eps) + " does not exceed 2h = " +
                                  std::to_string(2.0 * mesh->h()));
    }
  }
  ErrorTable table;
  table.key_name = "eps";
  table.order_axis = "eps";
  table.rows = run_rows(eps_list.size(), [&](std::size_t i) {
    TanhOptions options = base;
    options.eps = eps_list[i];
    auto row = error_norms(tanh_case(options, params), mesh, dt, t_end, sample_times);
    row.key = eps_list[i];
    return row;
  });
  fill_orders(table, eps_list);
  table.metadata = {{"study", "interface"}, {"case", "tanh"}, {"nx", std::to_string(nx)},
                    {"dt", std::to_string(dt)}, {"t_end", std::to_string(t_end)},
                    {"sample_times", join(sample_times)}};
  return table;
}

unsigned worker_count() {
  if (const char* env = std::getenv("GSFV_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace gsfv::mms
