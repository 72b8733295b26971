// Command-line front end over the dislocate C API: energy evaluation,
// landscape grids, convergence studies, n-gon sweeps, derivative-free
// minimization, coarsening, and the self-test runner.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "dislocate/dislocate.h"

namespace {

constexpr double kTau = 6.283185307179586476925287;

struct DomainHandle {
  dislocate_domain* ptr = nullptr;
  ~DomainHandle() { dislocate_domain_free(ptr); }
};
struct DatumHandle {
  dislocate_datum* ptr = nullptr;
  ~DatumHandle() { dislocate_datum_free(ptr); }
};
struct ConfigHandle {
  dislocate_config* ptr = nullptr;
  ~ConfigHandle() { dislocate_config_free(ptr); }
};
struct ReportHandle {
  dislocate_report* ptr = nullptr;
  ~ReportHandle() { dislocate_report_free(ptr); }
};
struct ResultHandle {
  dislocate_result* ptr = nullptr;
  ~ResultHandle() { dislocate_result_free(ptr); }
};
struct TraceHandle {
  dislocate_trace* ptr = nullptr;
  ~TraceHandle() { dislocate_trace_free(ptr); }
};

[[noreturn]] void die(const std::string& message) {
  std::fprintf(stderr, "dislocate: %s\n", message.c_str());
  std::exit(1);
}

void check(dislocate_status st) {
  if (st != DISLOCATE_OK) die(dislocate_last_error());
}

struct CommonArgs {
  std::string domain_file;
  std::string preset;
  std::vector<std::string> points;
  std::string epsilon;
  std::string grid = "64x128";
  int n = 0;
  std::string n_range;
  int starts = 8;
  std::uint64_t seed = 1;
  double tol = 0.0;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--domain", a.domain_file, "domain description file");
  cmd->add_option("--preset", a.preset, "boundary datum: g1, g2, const:<n>, file:<path>");
  cmd->add_option("--points", a.points, "dislocation position x,y (repeatable)");
  cmd->add_option("--epsilon", a.epsilon, "core radius or comma list");
  cmd->add_option("--grid", a.grid, "landscape grid RxT");
  cmd->add_option("--n", a.n, "dislocation count");
  cmd->add_option("--n-range", a.n_range, "range a:b of dislocation counts");
  cmd->add_option("--starts", a.starts, "multistart count");
  cmd->add_option("--seed", a.seed, "random seed");
  cmd->add_option("--tol", a.tol, "quadrature relative tolerance");
  cmd->add_option("--out", a.out_dir, "output directory");
}

DomainHandle open_domain(const CommonArgs& a) {
  DomainHandle d;
  if (a.domain_file.empty()) {
    check(dislocate_domain_unit_disk(1.0, &d.ptr));
  } else {
    check(dislocate_domain_load(a.domain_file.c_str(), &d.ptr));
  }
  return d;
}

DatumHandle open_datum(const CommonArgs& a, const DomainHandle& d, int default_n) {
  DatumHandle datum;
  if (a.preset.empty()) {
    check(dislocate_datum_const(d.ptr, default_n, &datum.ptr));
  } else if (a.preset.rfind("const:", 0) == 0) {
    check(dislocate_datum_const(d.ptr, std::stoi(a.preset.substr(6)), &datum.ptr));
  } else {
    check(dislocate_datum_preset(d.ptr, a.preset.c_str(), &datum.ptr));
  }
  return datum;
}

std::vector<double> parse_points(const std::vector<std::string>& specs) {
  std::vector<double> xy;
  for (const auto& s : specs) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) die("--points wants x,y");
    xy.push_back(std::stod(s.substr(0, comma)));
    xy.push_back(std::stod(s.substr(comma + 1)));
  }
  return xy;
}

std::vector<double> parse_epsilons(const std::string& spec) {
  std::vector<double> eps;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    auto comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    eps.push_back(std::stod(spec.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return eps;
}

std::string csv_row(const ReportHandle& r) {
  char buf[512];
  dislocate_report_csv_row(r.ptr, buf, sizeof(buf));
  return buf;
}

std::string csv_header() {
  char buf[256];
  dislocate_report_csv_header(buf, sizeof(buf));
  return buf;
}

// ---------- SVG helpers ----------

std::string ramp_color(double t) {
  // Linear blue -> red.
  const int r = static_cast<int>(std::lround(255.0 * t));
  const int b = static_cast<int>(std::lround(255.0 * (1.0 - t)));
  return fmt::format("rgb({},0,{})", r, b);
}

void write_polar_heatmap_svg(const std::string& path, int nr, int ntheta,
                             const std::vector<double>& values) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) hi = lo + 1.0;

  std::ofstream svg(path, std::ios::binary);
  if (!svg) die("cannot write " + path);
  const int size = 640;
  const double c = size / 2.0;
  const double scale = 0.46 * size;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\""
      << size << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  svg << "<!-- polar heatmap; linear color ramp, blue = " << fmt::format("{}", lo)
      << ", red = " << fmt::format("{}", hi) << ", infinite cells white -->\n";
  svg << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
  // One rotated rect per polar cell.
  for (int ir = 0; ir < nr; ++ir) {
    const double r0 = static_cast<double>(ir) / nr;
    const double r1 = static_cast<double>(ir + 1) / nr;
    const double rm = 0.5 * (r0 + r1);
    for (int it = 0; it < ntheta; ++it) {
      const double v = values[static_cast<std::size_t>(ir) * ntheta + it];
      std::string fill = "white";
      if (std::isfinite(v)) fill = ramp_color((v - lo) / (hi - lo));
      const double th = (it + 0.5) * kTau / ntheta;
      const double w = scale * (r1 - r0) * 1.05;
      const double h = scale * rm * (kTau / ntheta) * 1.05 + 0.5;
      const double cx = c + scale * rm * std::cos(th);
      const double cy = c - scale * rm * std::sin(th);
      svg << fmt::format(
          "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" "
          "transform=\"rotate({} {} {})\"/>\n",
          cx - 0.5 * w, cy - 0.5 * h, w, h, fill, -th * 360.0 / kTau, cx, cy);
    }
  }
  svg << fmt::format(
      "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"black\"/>\n", c, c,
      scale);
  svg << fmt::format(
      "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" "
      "stroke-width=\"0.5\"/>\n",
      c - scale, c, c + scale, c);
  svg << fmt::format(
      "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" "
      "stroke-width=\"0.5\"/>\n",
      c, c - scale, c, c + scale);
  svg << "</svg>\n";
}

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::vector<std::pair<double, double>>& pts) {
  std::ofstream svg(path, std::ios::binary);
  if (!svg) die("cannot write " + path);
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  std::vector<std::pair<double, double>> logs;
  for (const auto& [x, y] : pts) {
    if (x <= 0 || y <= 0) continue;
    logs.emplace_back(std::log10(x), std::log10(y));
    xlo = std::min(xlo, logs.back().first);
    xhi = std::max(xhi, logs.back().first);
    ylo = std::min(ylo, logs.back().second);
    yhi = std::max(yhi, logs.back().second);
  }
  if (logs.empty()) die("nothing to plot in " + path);
  if (xhi - xlo < 1e-12) xhi = xlo + 1;
  if (yhi - ylo < 1e-12) yhi = ylo + 1;
  const int w = 640, h = 480, m = 60;
  auto X = [&](double lx) { return m + (lx - xlo) / (xhi - xlo) * (w - 2 * m); };
  auto Y = [&](double ly) { return h - m - (ly - ylo) / (yhi - ylo) * (h - 2 * m); };
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  svg << fmt::format("<text x=\"{}\" y=\"20\" font-size=\"14\">{} (log-log)</text>\n", m,
                     title);
  svg << fmt::format(
      "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", m, h - m,
      w - m, h - m);
  svg << fmt::format(
      "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", m, m, m, h - m);
  svg << "<polyline fill=\"none\" stroke=\"blue\" points=\"";
  for (const auto& [lx, ly] : logs) svg << fmt::format("{},{} ", X(lx), Y(ly));
  svg << "\"/>\n";
  for (const auto& [lx, ly] : logs) {
    svg << fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"blue\"/>\n", X(lx),
                       Y(ly));
  }
  svg << "</svg>\n";
}

// ---------- subcommands ----------

int cmd_energy(const CommonArgs& a) {
  DomainHandle d = open_domain(a);
  const std::vector<double> xy = parse_points(a.points);
  if (xy.empty()) die("energy needs at least one --points");
  ConfigHandle cfg;
  check(dislocate_config_create(d.ptr, xy.data(), xy.size() / 2, &cfg.ptr));
  DatumHandle datum = open_datum(a, d, static_cast<int>(xy.size() / 2));

  std::vector<double> eps;
  if (!a.epsilon.empty()) eps = parse_epsilons(a.epsilon);

  fmt::print("{}\n", csv_header());
  bool infinite = false;
  if (eps.empty()) {
    ReportHandle r;
    check(dislocate_renormalized_energy(d.ptr, datum.ptr, cfg.ptr, a.tol, &r.ptr));
    fmt::print("{}\n", csv_row(r));
    infinite = dislocate_report_infinite(r.ptr) != 0;
  } else {
    for (double e : eps) {
      ReportHandle r;
      check(dislocate_core_energy(d.ptr, datum.ptr, cfg.ptr, e, a.tol, 0, &r.ptr));
      fmt::print("{}\n", csv_row(r));
      infinite = infinite || dislocate_report_infinite(r.ptr) != 0;
    }
  }
  return infinite ? 2 : 0;
}

int cmd_landscape(const CommonArgs& a) {
  DomainHandle d = open_domain(a);
  DatumHandle datum = open_datum(a, d, 1);
  int n = 0;
  check(dislocate_datum_total(datum.ptr, &n));
  if (n != 1) die("landscape needs a circulation-one datum");

  int nr = 64, ntheta = 128;
  if (std::sscanf(a.grid.c_str(), "%dx%d", &nr, &ntheta) != 2 || nr < 2 || ntheta < 2) {
    die("--grid wants RxT with R,T >= 2");
  }
  std::vector<double> values(static_cast<std::size_t>(nr) * ntheta);
  check(dislocate_landscape(d.ptr, datum.ptr, nr, ntheta, a.tol, values.data()));

  std::filesystem::create_directories(a.out_dir);
  const std::string csv_path = a.out_dir + "/landscape.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) die("cannot write " + csv_path);
  csv << "x,y,F\n";
  for (int ir = 0; ir < nr; ++ir) {
    const double r = (ir + 0.5) / nr;
    for (int it = 0; it < ntheta; ++it) {
      const double th = (it + 0.5) * kTau / ntheta;
      csv << fmt::format("{},{},{}\n", r * std::cos(th), r * std::sin(th),
                         values[static_cast<std::size_t>(ir) * ntheta + it]);
    }
  }
  write_polar_heatmap_svg(a.out_dir + "/landscape.svg", nr, ntheta, values);
  fmt::print("landscape written to {}\n", a.out_dir);
  return 0;
}

int cmd_converge(const CommonArgs& a) {
  DomainHandle d = open_domain(a);
  const std::vector<double> xy = parse_points(a.points);
  if (xy.empty()) die("converge needs --points");
  ConfigHandle cfg;
  check(dislocate_config_create(d.ptr, xy.data(), xy.size() / 2, &cfg.ptr));
  DatumHandle datum = open_datum(a, d, static_cast<int>(xy.size() / 2));

  std::vector<double> eps = parse_epsilons(a.epsilon);
  if (eps.size() < 2) die("converge wants a strictly decreasing --epsilon list");
  for (std::size_t i = 1; i < eps.size(); ++i) {
    if (eps[i] >= eps[i - 1]) die("epsilon list must be strictly decreasing");
  }

  ReportHandle limit;
  check(dislocate_renormalized_energy(d.ptr, datum.ptr, cfg.ptr, a.tol, &limit.ptr));
  if (dislocate_report_infinite(limit.ptr) != 0) return 2;
  const double f_limit = dislocate_report_total(limit.ptr);

  int n = 0;
  check(dislocate_datum_total(datum.ptr, &n));

  fmt::print("epsilon,f_eps,gap,e_eps\n");
  bool gaps_ok = true, monotone_ok = true;
  double prev_gap = std::numeric_limits<double>::infinity();
  double prev_e = -std::numeric_limits<double>::infinity();
  for (double e : eps) {
    ReportHandle r;
    check(dislocate_core_energy(d.ptr, datum.ptr, cfg.ptr, e, a.tol, 0, &r.ptr));
    const double f_eps = dislocate_report_total(r.ptr);
    const double gap = f_eps - f_limit;
    const double e_eps = f_eps + kTau / 2.0 * n * std::abs(std::log(e));
    fmt::print("{},{},{},{}\n", e, f_eps, gap, e_eps);
    if (std::abs(gap) > std::abs(prev_gap) + 1e-12) gaps_ok = false;
    if (e_eps < prev_e - 1e-9) monotone_ok = false;
    prev_gap = gap;
    prev_e = e_eps;
  }
  fmt::print("limit,{},,\n", f_limit);
  if (!monotone_ok) die("core energies failed to increase as epsilon decreased");
  return gaps_ok ? 0 : 1;
}

int cmd_ngon(const CommonArgs& a) {
  DomainHandle d = open_domain(a);
  int n_min = a.n, n_max = a.n;
  if (!a.n_range.empty()) {
    if (std::sscanf(a.n_range.c_str(), "%d:%d", &n_min, &n_max) != 2 || n_min < 1 ||
        n_max < n_min) {
      die("--n-range wants a:b with 1 <= a <= b");
    }
  }
  if (n_min < 1) die("ngon needs --n or --n-range");

  fmt::print("n,radius,energy,dist_to_boundary,evals\n");
  std::vector<std::pair<double, double>> dist_pts, energy_pts;
  for (int n = n_min; n <= n_max; ++n) {
    DatumHandle datum;
    if (!a.preset.empty()) {
      datum = open_datum(a, d, n);
    } else {
      check(dislocate_datum_const(d.ptr, n, &datum.ptr));
    }
    ResultHandle res;
    check(dislocate_ngon_sweep(d.ptr, datum.ptr, n, nullptr, 0, 1e-4, a.tol, &res.ptr));
    std::vector<double> xy(2 * n);
    std::size_t written = 0;
    check(dislocate_result_points(res.ptr, xy.data(), n, &written));
    const double radius = std::hypot(xy[0], xy[1]);
    double dist = 0.0;
    check(dislocate_boundary_distance(d.ptr, xy[0], xy[1], &dist));
    const double energy = dislocate_result_energy(res.ptr);
    fmt::print("{},{},{},{},{}\n", n, radius, energy, dist,
               dislocate_result_evaluations(res.ptr));
    dist_pts.emplace_back(n, dist);
    energy_pts.emplace_back(n, std::abs(energy));
  }
  if (n_max > n_min) {
    std::filesystem::create_directories(a.out_dir);
    write_loglog_svg(a.out_dir + "/ngon_dist.svg", "distance to the boundary", dist_pts);
    write_loglog_svg(a.out_dir + "/ngon_energy.svg", "|energy|", energy_pts);
  }
  return 0;
}

int cmd_minimize(const CommonArgs& a) {
  DomainHandle d = open_domain(a);
  if (a.n < 1) die("minimize needs --n");
  DatumHandle datum = open_datum(a, d, a.n);
  ResultHandle res;
  check(dislocate_minimize(d.ptr, datum.ptr, a.n, a.starts, a.seed, a.tol, &res.ptr));
  fmt::print("energy,evaluations,converged\n");
  fmt::print("{},{},{}\n", dislocate_result_energy(res.ptr),
             dislocate_result_evaluations(res.ptr), dislocate_result_converged(res.ptr));
  std::vector<double> xy(2 * a.n);
  std::size_t written = 0;
  check(dislocate_result_points(res.ptr, xy.data(), a.n, &written));
  fmt::print("x,y\n");
  for (std::size_t i = 0; i < written; ++i) {
    fmt::print("{},{}\n", xy[2 * i], xy[2 * i + 1]);
  }
  return dislocate_result_converged(res.ptr) != 0 ? 0 : 1;
}

int cmd_coarsen(const CommonArgs& a) {
  DomainHandle d = open_domain(a);
  const std::vector<double> xy = parse_points(a.points);
  if (xy.empty()) die("coarsen needs --points");
  const std::vector<double> eps = parse_epsilons(a.epsilon);
  if (eps.size() != 1) die("coarsen wants a single --epsilon");
  ConfigHandle cfg;
  check(dislocate_config_create(d.ptr, xy.data(), xy.size() / 2, &cfg.ptr));
  TraceHandle trace;
  check(dislocate_coarsen(d.ptr, cfg.ptr, eps[0], &trace.ptr));

  fmt::print("step,action,s_hat,eta\n");
  const char* names[] = {"merge_midpoint", "project_to_boundary", "relabel"};
  for (std::size_t i = 0; i < dislocate_trace_steps(trace.ptr); ++i) {
    int action = 0;
    double s_hat = 0, eta = 0;
    check(dislocate_trace_step(trace.ptr, i, &action, &s_hat, &eta));
    fmt::print("{},{},{},{}\n", i + 1, names[action], s_hat, eta);
  }
  fmt::print("final_eta,{}\n", dislocate_trace_final_eta(trace.ptr));
  std::vector<double> fxy(xy.size());
  std::vector<int> mult(xy.size() / 2);
  std::size_t written = 0;
  check(dislocate_trace_final_points(trace.ptr, fxy.data(), mult.data(), mult.size(),
                                     &written));
  fmt::print("x,y,multiplicity\n");
  for (std::size_t i = 0; i < written && i < mult.size(); ++i) {
    fmt::print("{},{},{}\n", fxy[2 * i], fxy[2 * i + 1], mult[i]);
  }
  return 0;
}

int cmd_selftest(const CommonArgs&) {
  return dislocate_selftest() == DISLOCATE_OK ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"renormalized dislocation energies in convex planar domains"};
  app.require_subcommand(1);

  CommonArgs args;
  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const CommonArgs&);
  };
  const Sub subs[] = {
      {"energy", "energy of one configuration (CSV row to stdout)", cmd_energy},
      {"landscape", "single-dislocation energy landscape (CSV + SVG)", cmd_landscape},
      {"converge", "core-radius energies against the limit", cmd_converge},
      {"ngon", "regular n-gon circumradius sweep", cmd_ngon},
      {"minimize", "multistart derivative-free minimization", cmd_minimize},
      {"coarsen", "merge-or-project coarsening trace", cmd_coarsen},
      {"selftest", "run the invariant suites", cmd_selftest},
  };
  for (const Sub& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    add_common(cmd, args);
    cmd->callback([&args, &sub] { std::exit(sub.run(args)); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  return 0;
}
