#include "txn/cli.hpp"

#include "raster.hpp"
#include "txn/atomic_states.hpp"
#include "txn/dynamics.hpp"
#include "txn/experiments.hpp"
#include "txn/fields.hpp"
#include "txn/io.hpp"
#include "txn/paths.hpp"
#include "txn/timescales.hpp"

#include "CLI11.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace txn::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr const char *kOutputDirEnv = "TXN_OUTPUT_DIR";

std::string text(double v) { return format_double(v); }
std::string text(int v) { return std::to_string(v); }
std::string text(long v) { return std::to_string(v); }
std::string text(const std::string &v) { return '"' + v + '"'; }
std::string text(const std::optional<double> &v) { return v ? format_double(*v) : ""; }

struct Globals {
  std::string config;
  std::string output_dir = ".";
  std::string formats = "csv";
  std::uint64_t seed = 1;
  double tol = 1e-9;
  bool no_color = false;
};

struct Command;

struct Context {
  const Globals &g;
  Command &cmd;
  fs::path dir;
  std::ostream &out;
  std::set<std::string> formats;
  std::vector<std::string> written;

  bool want(const std::string &f) const { return formats.count(f) > 0; }
  KeyValues manifest() const;
  // the directory appears with the first file, so failed runs leave nothing
  fs::path file(const std::string &name) {
    fs::create_directories(dir);
    written.push_back(name);
    return dir / name;
  }
  void csv(const std::string &name, CsvTable t) {
    auto m = manifest();
    m.insert(m.end(), t.manifest.begin(), t.manifest.end());
    t.manifest = std::move(m);
    write_csv(file(name), t);
  }
  void report(const std::string &name, const KeyValues &kv) {
    auto m = manifest();
    KeyValues all;
    for (auto &[k, v] : m)
      all.emplace_back("# " + k, v);
    all.insert(all.end(), kv.begin(), kv.end());
    write_report(file(name), all);
  }
};

struct Command {
  std::string name;
  std::string artifact;
  bool monte_carlo = false;
  CLI::App *app = nullptr;
  std::vector<std::pair<std::string, std::function<std::string()>>> params;
  std::function<void(Context &)> body;

  template <class T>
  void param(const std::string &key, T &ref, const std::string &help) {
    app->add_option("--" + key, ref, help)->capture_default_str();
    params.emplace_back(key, [&ref] { return text(ref); });
  }
};

KeyValues Context::manifest() const {
  KeyValues m = {{"command", cmd.name}, {"artifact", cmd.artifact}};
  if (cmd.monte_carlo)
    m.emplace_back("seed", std::to_string(g.seed));
  for (const auto &[k, f] : cmd.params) {
    const auto v = f();
    if (!v.empty())
      m.emplace_back(k, v);
  }
  return m;
}

CsvTable trajectory_table(const Trajectory &tr, const std::string &time_unit) {
  CsvTable t;
  t.columns = {"t"};
  t.units = {time_unit};
  t.columns.insert(t.columns.end(), tr.columns.begin(), tr.columns.end());
  t.units.insert(t.units.end(), tr.units.begin(), tr.units.end());
  t.data.resize(tr.times.size(), Eigen::Index(t.columns.size()));
  t.data.col(0) = tr.times;
  t.data.rightCols(tr.values.cols()) = tr.values;
  for (const auto &[k, v] : tr.metadata)
    if (k.rfind("steps", 0) != 0 && k != "rhs_evaluations")
      t.manifest.emplace_back(k, v);
  return t;
}

CsvTable table(std::vector<std::string> columns, std::vector<std::string> units,
               Eigen::MatrixXd data) {
  CsvTable t;
  t.columns = std::move(columns);
  t.units = std::move(units);
  t.data = std::move(data);
  return t;
}

void write_manifest(Context &ctx) {
  std::ofstream os(ctx.file("manifest.txt"), std::ios::binary);
  if (!os)
    throw IoError("cannot write manifest in " + ctx.dir.string());
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  os << "# txn run manifest; replay with: txn replay <this file>\n";
  os << "# written " << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ") << '\n';
  os << "# artifact: " << ctx.cmd.artifact << '\n';
  os << "format = " << text(ctx.g.formats) << '\n';
  os << "seed = " << ctx.g.seed << '\n';
  os << "tol = " << text(ctx.g.tol) << '\n';
  os << '[' << ctx.cmd.name << "]\n";
  for (const auto &[k, f] : ctx.cmd.params) {
    const auto v = f();
    if (!v.empty())
      os << k << " = " << v << '\n';
  }
  if (!os)
    throw IoError("manifest write failed");
}

// ---------------------------------------------------------------------------
// commands

struct StatesParams {
  QuadratureSpec spec;
  double a = 1.0 / std::numbers::sqrt2;
  double phi = 0.0;
  double phase = 0.0;
  double z_max = 10.0;
  int z_points = 401;
};

void run_states(Context &ctx, const StatesParams &p) {
  const auto s100 = EigenState::hydrogen_100(), s210 = EigenState::hydrogen_210();
  const auto n11 = norm_integral(s100, s100, p.spec), n22 = norm_integral(s210, s210, p.spec),
             n12 = norm_integral(s100, s210, p.spec);
  const auto d12 = dipole_strength(s100, s210, p.spec);
  const auto e = transition_energy();
  const auto state = SuperpositionState::two_level(p.a, std::sqrt(1.0 - p.a * p.a), p.phi);
  const Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(p.z_points, -p.z_max, p.z_max);
  const auto now = mixed_density_slice(state, p.phase, z, p.spec);
  const auto half = mixed_density_slice(state, p.phase + kPi, z, p.spec);

  // amplitudes on the z axis: theta = 0 above the nucleus, pi below
  Eigen::MatrixXd axis(z.size(), 3);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double r = std::abs(z[i]), theta = z[i] < 0.0 ? kPi : 0.0;
    axis.row(i) << z[i], s100.amplitude(r, theta), s210.amplitude(r, theta);
  }
  ctx.csv("states_axis.csv", table({"z", "psi_100", "psi_210"}, {"a0", "a0^-3/2", "a0^-3/2"}, axis));

  Eigen::MatrixXd data(z.size(), 6);
  data << z, now.ground, now.excited, now.cross, now.total, half.total;
  ctx.csv("states_slices.csv",
          table({"z", "ground", "excited", "cross", "total", "total_half_period"},
                {"a0", "1/a0", "1/a0", "1/a0", "1/a0", "1/a0"}, data));
  const KeyValues kv = {
      {"norm_100_100", text(n11.value)},
      {"norm_210_210", text(n22.value)},
      {"overlap_100_210", text(n12.value)},
      {"quadrature_converged", (n11.converged && n22.converged && n12.converged) ? "1" : "0"},
      {"d12_q_a0", text(d12.q_a0)},
      {"d12_si", text(d12.si)},
      {"energy_rydberg_ev", text(e.rydberg_ev)},
      {"energy_printed_ev", text(e.printed_ev)},
      {"energy_discrepancy", e.discrepancy ? "1" : "0"},
      {"omega0", text(e.omega0)},
      {"wavelength", text(e.wavelength)},
      {"slice_integral", text(integrate_sampled(z, now.total))}};
  ctx.report("states_report.txt", kv);
  ctx.out << "d12 = " << d12.q_a0 << " q a0, E0 = " << e.rydberg_ev << " eV (printed form "
          << e.printed_ev << " eV)\n";
}

struct TwoAtomParams {
  TwoAtomScenario s{1.0, -10.0, 10.0, 0.5, -1.0, 401};
  double midpoint = 0.0;
  std::optional<double> initial;
};

void run_two_atom(Context &ctx, TwoAtomParams p) {
  p.s.initial_b2_alpha =
      p.initial ? *p.initial : analytic_two_atom(p.s.t_start, p.s.tau, p.midpoint).b2_alpha;
  const auto tr = integrate_two_atom(p.s, ctx.g.tol);
  const double offset = logistic_offset(p.s.t_start, p.s.initial_b2_alpha, p.s.tau);
  auto t = trajectory_table(tr, "time");
  Eigen::VectorXd oracle(tr.times.size());
  for (Eigen::Index i = 0; i < tr.times.size(); ++i)
    oracle[i] = analytic_two_atom(tr.times[i], p.s.tau, offset).b2_alpha;
  t.columns.push_back("b2_alpha_analytic");
  t.units.push_back("1");
  t.data.conservativeResize(Eigen::NoChange, t.data.cols() + 1);
  t.data.col(t.data.cols() - 1) = oracle;
  ctx.csv("two_atom.csv", t);
  ctx.out << "max |b2_alpha - logistic| = "
          << (tr.series("b2_alpha") - oracle).cwiseAbs().maxCoeff()
          << ", conservation error = " << tr.max_conservation_error() << '\n';
}

void run_compete(Context &ctx, const CompetitionScenario &s) {
  const auto tr = integrate_competition(s, ctx.g.tol);
  ctx.csv("compete.csv", trajectory_table(tr, "time"));
  const auto last = tr.values.row(tr.values.rows() - 1);
  ctx.out << "final b2_beta1 = " << last[1] << ", b2_beta2 = " << last[2]
          << (tr.clamp_diagnostic ? " (sqrt clamping exceeded 1e-9)" : "") << '\n';
}

struct CascadeParams {
  CascadeScenario s;
};

void run_cascade(Context &ctx, CascadeParams p) {
  p.s.c2 = 1.0 - p.s.a2 - p.s.b2;
  const auto tr = integrate_cascade(p.s, ctx.g.tol);
  ctx.csv("cascade.csv", trajectory_table(tr, "tau_alpha"));
  ctx.out << "upper envelope peak t = " << peak_time(tr, "upper_envelope")
          << ", lower envelope peak t = " << peak_time(tr, "lower_envelope")
          << ", final a2 = " << tr.values(tr.values.rows() - 1, 0) << '\n';
}

struct FieldParams {
  double separation = 12.0;
  double t_start = 0.0;
  int frames = 1;
  double frame_step = 2.0 * kPi / 16.0;
  double x_margin = 5.0;
  double y_half = 10.0;
  int nx = 801, ny = 401;
  double exclusion = 0.05;
  double envelope_rate = 1.0;

  HandshakeFieldConfig config() const {
    HandshakeFieldConfig cfg = HandshakeFieldConfig::with_separation(separation);
    cfg.grid = {-x_margin, separation + x_margin, -y_half, y_half, nx, ny};
    cfg.exclusion_radius = exclusion;
    cfg.envelope_rate = envelope_rate;
    cfg.times.clear();
    for (int k = 0; k < frames; ++k)
      cfg.times.push_back(t_start + frame_step * k);
    return cfg;
  }
};

void run_fieldmap(Context &ctx, const FieldParams &p) {
  const auto cfg = p.config();
  cfg.validate();
  const auto movie = field_movie(cfg);
  const auto contours = zero_crossing_contours(cfg, cfg.times.front());
  if (ctx.want("csv")) {
    const Eigen::Index per = movie.x.size() * movie.y.size();
    Eigen::MatrixXd data(per * Eigen::Index(movie.frames.size()), 5);
    Eigen::Index row = 0;
    for (std::size_t k = 0; k < movie.frames.size(); ++k)
      for (Eigen::Index r = 0; r < movie.y.size(); ++r)
        for (Eigen::Index c = 0; c < movie.x.size(); ++c)
          data.row(row++) << double(k), movie.times[k], movie.x[c], movie.y[r],
              movie.frames[k](r, c);
    ctx.csv("fieldmap.csv", table({"frame", "t", "x", "y", "A"},
                                  {"", "1/omega0", "lambda/2pi", "lambda/2pi", "1/tau"}, data));

    std::vector<std::array<double, 3>> rows;
    for (std::size_t k = 0; k < movie.axis_maxima.size(); ++k)
      for (double x : movie.axis_maxima[k])
        rows.push_back({double(k), movie.times[k], x});
    Eigen::MatrixXd m(Eigen::Index(rows.size()), 3);
    for (std::size_t i = 0; i < rows.size(); ++i)
      m.row(Eigen::Index(i)) << rows[i][0], rows[i][1], rows[i][2];
    ctx.csv("axis_maxima.csv",
            table({"frame", "t", "x"}, {"", "1/omega0", "lambda/2pi"}, std::move(m)));

    long n = 0;
    for (const auto &l : contours.lines)
      n += long(l.points.size());
    Eigen::MatrixXd cm(n, 4);
    Eigen::Index i = 0;
    for (std::size_t id = 0; id < contours.lines.size(); ++id)
      for (const auto &pt : contours.lines[id].points)
        cm.row(i++) << double(id), contours.lines[id].closed ? 1.0 : 0.0, pt[0], pt[1];
    ctx.csv("zero_crossings.csv", table({"polyline", "closed", "x", "y"},
                                        {"", "", "lambda/2pi", "lambda/2pi"}, std::move(cm)));
  }
  if (ctx.want("binary-grid"))
    write_grid(ctx.file("fieldmap.grid"), {movie.x, movie.y, movie.times, movie.frames});
  if (ctx.want("png"))
    for (std::size_t k = 0; k < movie.frames.size(); ++k) {
      std::ostringstream name;
      name << "fieldmap_" << std::setw(3) << std::setfill('0') << k << ".png";
      write_png(ctx.file(name.str()), movie.frames[k]);
    }
  const auto track = track_axis_maxima(movie);
  ctx.out << movie.frames.size() << " frame(s), " << contours.lines.size()
          << " zero-crossing polylines, " << contours.saddle_cells.size() << " saddle cells";
  if (movie.frames.size() > 1)
    ctx.out << ", axis maxima moving toward beta: " << track.forward_steps << "/"
            << track.tracked_steps;
  ctx.out << '\n';
}

struct StreamParams {
  FieldParams field;
  double t = 0.0;
  int averaged = 1;
  int seeds = 9;
  double seed_y = 0.0;
  double max_length = 200.0;
  double tolerance = 1e-8;
  double box_half = 1.0;
};

void run_streamlines(Context &ctx, const StreamParams &p) {
  auto cfg = p.field.config();
  std::vector<Eigen::Vector2d> seeds;
  for (int i = 0; i < p.seeds; ++i)
    seeds.emplace_back(cfg.separation * (i + 1) / double(p.seeds + 1), p.seed_y);
  StreamlineOptions opts;
  opts.time_averaged = p.averaged != 0;
  opts.t = p.t;
  opts.max_length = p.max_length;
  opts.tolerance = p.tolerance;
  const auto lines = poynting_streamlines(cfg, seeds, opts);

  long n = 0;
  for (const auto &l : lines)
    n += long(l.points.size());
  Eigen::MatrixXd m(n, 3);
  Eigen::Index row = 0;
  KeyValues kv;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (const auto &pt : lines[i].points)
      m.row(row++) << double(i), pt[0], pt[1];
    kv.emplace_back("line_" + std::to_string(i) + "_end", to_string(lines[i].end));
    kv.emplace_back("line_" + std::to_string(i) + "_length", text(lines[i].length));
  }
  if (ctx.want("csv"))
    ctx.csv("streamlines.csv",
            table({"polyline", "x", "y"}, {"", "lambda/2pi", "lambda/2pi"}, std::move(m)));
  // source-free boxes: midway above the axis, and off to either side
  const std::vector<Eigen::Vector3d> centres = {{cfg.separation / 2, 3.0, 0.0},
                                                {cfg.separation / 2, -5.0, 0.0},
                                                {-3.0, 3.0, 0.0},
                                                {cfg.separation + 3.0, -3.0, 0.0}};
  double worst = 0.0;
  for (std::size_t i = 0; i < centres.size(); ++i) {
    const auto fb = box_flux(cfg, centres[i], p.box_half);
    kv.emplace_back("box_" + std::to_string(i) + "_relative_imbalance", text(fb.relative()));
    worst = std::max(worst, fb.relative());
  }
  ctx.report("streamlines_report.txt", kv);
  long at_beta = 0;
  for (const auto &l : lines)
    at_beta += l.end == StreamEnd::ReachedBeta;
  ctx.out << at_beta << "/" << lines.size()
          << " streamlines end at the absorber; worst box flux imbalance " << worst << '\n';
}

struct PathParams {
  double wavelength = 1.0;
  double r_min = 100.0, r_max = 1e4;
  int r_count = 9;
  double theta_max = 0.8, taper = 0.2;
  int lens_paths = 1001;
};

void run_paths(Context &ctx, const PathParams &p) {
  if (p.r_count < 2)
    throw std::invalid_argument("paths: r-count must be at least 2");
  std::vector<double> rs;
  for (int i = 0; i < p.r_count; ++i)
    rs.push_back(p.r_min * std::pow(p.r_max / p.r_min, double(i) / double(p.r_count - 1)));
  RingSampling sampling;
  sampling.theta_max = p.theta_max;
  sampling.taper = p.taper;
  const auto study = amplitude_vs_distance(rs, p.wavelength, sampling);
  sampling.theta_step = study.theta_step;
  auto lens = PathEnsemble::uniform(p.r_min, p.wavelength, 0.25 * p.r_min, p.lens_paths);
  lens.delay = equal_delay_lens(p.r_min);
  const auto lensed = phasor_sum(lens);
  const auto near = ring_ensemble(p.r_min, p.wavelength, sampling);
  const auto res = phasor_sum(near);
  const auto zone_near = zone_analysis(near);
  const auto zone_far = zone_analysis(ring_ensemble(p.r_max, p.wavelength, sampling));

  Eigen::MatrixXd amp(study.distances.size(), 3);
  for (Eigen::Index i = 0; i < amp.rows(); ++i)
    amp.row(i) << study.distances[i], study.amplitudes[i], double(study.path_counts[std::size_t(i)]);
  ctx.csv("paths_amplitude.csv",
          table({"r", "amplitude", "paths"}, {"wavelength", "1", ""}, std::move(amp)));

  Eigen::MatrixXd sea(Eigen::Index(res.arrows.size()), 5);
  for (std::size_t j = 0; j < res.arrows.size(); ++j)
    sea.row(Eigen::Index(j)) << near.offsets[j], res.arrows[j].real(), res.arrows[j].imag(),
        res.partial_sums[j].real(), res.partial_sums[j].imag();
  ctx.csv("paths_seahorse.csv",
          table({"offset", "arrow_re", "arrow_im", "partial_re", "partial_im"},
                {"wavelength", "1", "1", "1", "1"}, std::move(sea)));

  ctx.report("paths_report.txt",
             {{"amplitude_slope", text(study.slope)},
              {"intensity_slope", text(study.intensity_slope)},
              {"theta_step", text(study.theta_step)},
              {"zone_width_ratio_near", text(zone_near.width_ratio)},
              {"zone_width_ratio_far", text(zone_far.width_ratio)},
              {"outer_projection_near", text(zone_near.outer_projection)},
              {"outer_magnitude_near", text(zone_near.outer_magnitude)},
              {"lens_paths", std::to_string(p.lens_paths)},
              {"lens_resultant", text(lensed.amplitude)}});
  ctx.out << "amplitude slope " << study.slope << ", intensity slope " << study.intensity_slope
          << ", lens resultant " << lensed.amplitude << " of " << p.lens_paths << '\n';
}

struct EnhancementParams {
  double r = 1.0;
  double solid_angle = 1.0;
  std::optional<double> wavelength;
};

void run_enhancement(Context &ctx, const EnhancementParams &p) {
  const auto k = codata2018();
  const auto e = transition_energy(k);
  const double lambda = p.wavelength ? *p.wavelength : e.wavelength;
  const double factor = enhancement_factor(p.r, lambda, p.solid_angle);
  const double free = transition_time(p.r, k);
  const double optics = transition_time(p.r, k, p.solid_angle) * e.wavelength / lambda;
  const auto d12 = dipole_strength(EigenState::hydrogen_100(), EigenState::hydrogen_210());
  const double chain_quadrature = transition_time_from_power(d12.si, e.rydberg_joules, e.omega0, p.r, k);
  const double rough_d12 = 3.0 * k.electron_charge * k.bohr_radius;
  const double chain_rough =
      transition_time_from_power(rough_d12, e.printed_joules, e.omega0, p.r, k);
  ctx.report("enhancement.txt", {{"wavelength", text(lambda)},
                                 {"enhancement_factor", text(factor)},
                                 {"transition_time_free", text(free)},
                                 {"transition_time_optics", text(optics)},
                                 {"transition_time_power_quadrature_d12", text(chain_quadrature)},
                                 {"transition_time_power_rough_d12", text(chain_rough)}});
  ctx.out << "enhancement factor " << factor << ", transition time " << free << " s free, "
          << optics << " s with optics\n";
}

struct HbtParams {
  HbtGeometry g;
  double dab_max = 0.02;
  int samples = 2001;
};

void run_hbt(Context &ctx, HbtParams p) {
  Eigen::MatrixXd m(p.samples, 2);
  for (int i = 0; i < p.samples; ++i) {
    p.g.d_ab = p.dab_max * i / double(p.samples - 1);
    m.row(i) << p.g.d_ab, hbt_coincidence_rate(p.g);
  }
  p.g.d_ab = 0.0;
  ctx.csv("hbt.csv", table({"d_ab", "rate"}, {"m", "1"}, std::move(m)));
  const double scanned = hbt_scanned_period(p.g, p.dab_max, p.samples);
  ctx.report("hbt_report.txt", {{"rate_at_zero", text(hbt_coincidence_rate(p.g))},
                                {"fringe_period", text(hbt_fringe_period(p.g))},
                                {"fringe_period_scanned", text(scanned)},
                                {"far_field", p.g.far_field() ? "1" : "0"}});
  if (!p.g.far_field())
    ctx.out << "warning: L is not much larger than the separations\n";
  ctx.out << "fringe period " << hbt_fringe_period(p.g) << " m (scan " << scanned << " m)\n";
}

void run_split(Context &ctx, EmitterStream s) {
  s.rng_seed = ctx.g.seed;
  const auto r = split_photon_run(s);
  Eigen::MatrixXd m(r.delays.size(), 2);
  m << r.delays, r.counts;
  ctx.csv("split_histogram.csv", table({"delay", "count"}, {"s", ""}, std::move(m)));
  ctx.report("split_report.txt",
             {{"primary_events", std::to_string(r.primary_events)},
              {"background_events", std::to_string(r.background_events)},
              {"detected_a", std::to_string(r.detected_a)},
              {"detected_b", std::to_string(r.detected_b)},
              {"lost", std::to_string(r.lost)},
              {"zero_bin", text(r.zero_bin)},
              {"plateau", text(r.plateau)},
              {"accidental_oracle", text(r.accidental_oracle)},
              {"degenerate", r.degenerate ? "1" : "0"}});
  ctx.out << "zero-delay bin " << r.zero_bin << " vs plateau " << r.plateau
          << " (accidental estimate " << r.accidental_oracle << ")\n";
}

struct FcParams {
  double eff_major = 1.0, eff_minor = 0.0;
  long samples = 1'000'000;
  int phi_points = 19;
};

void run_fc(Context &ctx, const FcParams &p) {
  if (p.phi_points < 2)
    throw std::invalid_argument("fc: phi-points must be at least 2");
  std::vector<double> phis;
  for (int i = 0; i < p.phi_points; ++i)
    phis.push_back(0.5 * kPi * i / double(p.phi_points - 1));
  const auto rows =
      fc_curve(PolarimeterPair::symmetric(0.0, p.eff_major, p.eff_minor), phis, p.samples, ctx.g.seed);
  Eigen::MatrixXd m(Eigen::Index(rows.size()), 4);
  for (std::size_t i = 0; i < rows.size(); ++i)
    m.row(Eigen::Index(i)) << rows[i].phi, rows[i].ti, rows[i].classical, rows[i].classical_error;
  ctx.csv("fc.csv", table({"phi", "ti", "classical", "classical_error"}, {"rad", "1", "1", "1"},
                          std::move(m)));
  ctx.out << "at 90 degrees: transactional " << rows.back().ti << ", classical "
          << rows.back().classical << " +- " << rows.back().classical_error << '\n';
}

void run_constants(Context &ctx) {
  const auto k = codata2018();
  const auto e = transition_energy(k);
  ctx.report("constants.txt",
             {{"bohr_radius", text(k.bohr_radius)},
              {"electron_charge", text(k.electron_charge)},
              {"electron_mass", text(k.electron_mass)},
              {"hbar", text(k.hbar)},
              {"c", text(k.c)},
              {"mu0", text(k.mu0)},
              {"eps0", text(k.eps0)},
              {"eps0_mu0_c2_minus_1", text(k.eps0 * k.mu0 * k.c * k.c - 1.0)},
              {"derived_bohr_radius", text(k.derived_bohr_radius())},
              {"hartree_ev", text(k.hartree() / k.electron_volt())},
              {"energy_rydberg_ev", text(e.rydberg_ev)},
              {"energy_printed_ev", text(e.printed_ev)},
              {"omega0", text(e.omega0)},
              {"wavelength", text(e.wavelength)}});
  ctx.out << "omega0 = " << e.omega0 << " rad/s, lambda = " << e.wavelength << " m\n";
}

std::set<std::string> parse_formats(const std::string &s) {
  std::set<std::string> out;
  std::stringstream ss(s);
  std::string f;
  while (std::getline(ss, f, ',')) {
    if (f != "csv" && f != "binary-grid" && f != "png")
      throw CLI::ValidationError("--format", "unknown format '" + f +
                                                 "' (accepted: csv, binary-grid, png)");
    out.insert(f);
  }
  if (out.empty())
    throw CLI::ValidationError("--format", "no output format given");
  return out;
}

std::string accepted_keys(const Command &c) {
  std::string s;
  for (const auto &[k, f] : c.params)
    s += (s.empty() ? "" : ", ") + k;
  return s;
}

std::string red(const std::string &s, bool color) {
  return color ? "\033[31m" + s + "\033[0m" : s;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Transaction model simulator: amplitude transfer, handshake fields, path sums "
               "and coincidence experiments."};
  app.name("txn");
  app.require_subcommand(1);
  // global options may follow the command name
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "key = value file with [command] sections");

  Globals g;
  const char *env_dir = std::getenv(kOutputDirEnv);
  if (env_dir && *env_dir)
    g.output_dir = env_dir;
  auto *dir_opt = app.add_option("--output-dir", g.output_dir,
                                 std::string("output directory (also ") + kOutputDirEnv + ")");
  app.add_option("--format", g.formats, "comma-separated subset of csv,binary-grid,png")
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--tol", g.tol, "integrator relative tolerance")->capture_default_str();
  app.add_flag("--no-color", g.no_color, "plain diagnostics");

  std::vector<std::unique_ptr<Command>> commands;
  auto add = [&](const std::string &name, const std::string &artifact, const std::string &help) {
    auto c = std::make_unique<Command>();
    c->name = name;
    c->artifact = artifact;
    c->app = app.add_subcommand(name, help);
    commands.push_back(std::move(c));
    return commands.back().get();
  };

  StatesParams states;
  {
    auto *c = add("states", "figures 3 and 5", "hydrogen states, dipole strength, slices");
    c->param("radial-cutoff", states.spec.radial_cutoff, "radial cutoff [a0]");
    c->param("radial-points", states.spec.radial_points, "radial nodes");
    c->param("angular-points", states.spec.angular_points, "angular nodes");
    c->param("a", states.a, "ground-state amplitude");
    c->param("phi", states.phi, "relative phase [rad]");
    c->param("phase", states.phase, "optical phase omega0 t [rad]");
    c->param("z-max", states.z_max, "slice range [a0]");
    c->param("z-points", states.z_points, "slice count");
    c->body = [&](Context &ctx) { run_states(ctx, states); };
  }
  TwoAtomParams two;
  {
    auto *c = add("two-atom", "figure 4", "emitter-absorber amplitude transfer");
    c->param("tau", two.s.tau, "transition timescale");
    c->param("t-start", two.s.t_start, "start time");
    c->param("t-end", two.s.t_end, "end time");
    c->param("samples", two.s.samples, "output samples");
    c->param("sin-phi", two.s.phase_sin_phi, "sine of the relative phase");
    c->param("midpoint", two.midpoint, "time of half transfer when no initial value is given");
    c->param("initial-b2-alpha", two.initial, "emitter upper-state occupation at t-start");
    c->body = [&](Context &ctx) { run_two_atom(ctx, two); };
  }
  CompetitionScenario comp;
  {
    auto *c = add("compete", "figure 6", "one emitter, two detuned absorbers");
    c->param("tau", comp.tau, "transition timescale");
    c->param("delta-omega", comp.delta_omega, "detuning of beta2 [1/tau]");
    c->param("seed-beta1", comp.seed_beta1, "initial b2 of beta1");
    c->param("seed-beta2", comp.seed_beta2, "initial b2 of beta2");
    c->param("t-start", comp.t_start, "start time");
    c->param("t-end", comp.t_end, "end time");
    c->param("samples", comp.samples, "output samples");
    c->body = [&](Context &ctx) { run_compete(ctx, comp); };
  }
  CascadeParams casc;
  {
    auto *c = add("cascade", "figure 13", "three-level cascade c -> b -> a");
    c->param("tau-alpha", casc.s.tau_alpha, "upper transition timescale");
    c->param("tau-beta", casc.s.tau_beta, "lower transition timescale");
    c->param("a2", casc.s.a2, "initial ground occupation");
    c->param("b2", casc.s.b2, "initial middle occupation (c2 = 1 - a2 - b2)");
    c->param("t-start", casc.s.t_start, "start time [tau_alpha]");
    c->param("t-end", casc.s.t_end, "end time [tau_alpha]");
    c->param("samples", casc.s.samples, "output samples");
    c->body = [&](Context &ctx) { run_cascade(ctx, casc); };
  }
  auto field_params = [](Command *c, FieldParams &f) {
    c->param("separation", f.separation, "atom separation [lambda/2pi]");
    c->param("x-margin", f.x_margin, "grid margin beyond the atoms");
    c->param("y-half", f.y_half, "grid half-height");
    c->param("nx", f.nx, "grid columns");
    c->param("ny", f.ny, "grid rows");
    c->param("exclusion", f.exclusion, "exclusion disc radius");
    c->param("envelope-rate", f.envelope_rate, "1/tau amplitude factor");
  };
  FieldParams field;
  {
    auto *c = add("fieldmap", "figures 8, 9 and 10 (zero crossings)",
                  "handshake potential frames, axis maxima and zero crossings");
    field_params(c, field);
    c->param("t-start", field.t_start, "first frame time [1/omega0]");
    c->param("frames", field.frames, "frame count");
    c->param("frame-step", field.frame_step, "time between frames [1/omega0]");
    c->body = [&](Context &ctx) { run_fieldmap(ctx, field); };
  }
  StreamParams stream;
  {
    auto *c = add("streamlines", "figure 10 (stream lines)", "Poynting streamlines and flux boxes");
    field_params(c, stream.field);
    c->param("t", stream.t, "snapshot time or averaging phase origin");
    c->param("averaged", stream.averaged, "1 for the period average, 0 for a snapshot");
    c->param("seeds", stream.seeds, "seeds spread between the atoms");
    c->param("seed-y", stream.seed_y, "seed offset from the axis");
    c->param("max-length", stream.max_length, "arc length limit");
    c->param("tolerance", stream.tolerance, "streamline integration tolerance");
    c->param("box-half", stream.box_half, "half-width of the flux boxes");
    c->body = [&](Context &ctx) { run_streamlines(ctx, stream); };
  }
  PathParams paths;
  {
    auto *c = add("paths", "path and lens figures", "phasor path sums and the 1/r law");
    c->param("wavelength", paths.wavelength, "wavelength (length unit)");
    c->param("r-min", paths.r_min, "smallest distance");
    c->param("r-max", paths.r_max, "largest distance");
    c->param("r-count", paths.r_count, "distances, log spaced");
    c->param("theta-max", paths.theta_max, "largest path angle [rad]");
    c->param("taper", paths.taper, "Gaussian taper width [rad]");
    c->param("lens-paths", paths.lens_paths, "paths in the lens check");
    c->body = [&](Context &ctx) { run_paths(ctx, paths); };
  }
  EnhancementParams enh;
  {
    auto *c = add("enhancement", "rate enhancement and transition time",
                  "optical enhancement factor and transition times");
    c->param("r", enh.r, "separation [m]");
    c->param("solid-angle", enh.solid_angle, "optics solid angle [sr]");
    c->param("wavelength", enh.wavelength, "wavelength [m] (default: 2p -> 1s line)");
    c->body = [&](Context &ctx) { run_enhancement(ctx, enh); };
  }
  HbtParams hbt;
  {
    auto *c = add("hbt", "intensity interferometer coincidences", "HBT coincidence fringe");
    c->param("d12", hbt.g.d12, "source separation [m]");
    c->param("distance", hbt.g.distance, "source-detector distance [m]");
    c->param("wavelength", hbt.g.wavelength, "wavelength [m]");
    c->param("dab-max", hbt.dab_max, "largest detector separation [m]");
    c->param("samples", hbt.samples, "scan samples");
    c->body = [&](Context &ctx) { run_hbt(ctx, hbt); };
  }
  EmitterStream split;
  {
    auto *c = add("split", "figure 12", "single-photon splitting delay histogram");
    c->monte_carlo = true;
    c->param("mean-interval", split.mean_interval, "mean emitter interval [s]");
    c->param("dead-time", split.dead_time, "re-excitation dead time [s]");
    c->param("background-interval", split.background_interval,
             "mean interval of second-atom excitations [s]");
    c->param("window", split.window, "bin width [s]");
    c->param("duration", split.duration, "run length [s]");
    c->param("p-loss", split.p_loss, "probability a photon goes to no detector");
    c->param("max-delay", split.max_delay, "histogram half-range [s]");
    c->param("plateau-delay", split.plateau_delay, "plateau starts here [s]");
    c->body = [&](Context &ctx) { run_split(ctx, split); };
  }
  FcParams fc;
  {
    auto *c = add("fc", "figure 15", "polarization coincidence curves");
    c->monte_carlo = true;
    c->param("eff-major", fc.eff_major, "major-axis transmittance");
    c->param("eff-minor", fc.eff_minor, "minor-axis transmittance");
    c->param("samples", fc.samples, "Monte Carlo samples per angle");
    c->param("phi-points", fc.phi_points, "angles from 0 to 90 degrees");
    c->body = [&](Context &ctx) { run_fc(ctx, fc); };
  }
  {
    auto *c = add("constants", "physical constants", "constants and derived checks");
    c->body = [&](Context &ctx) { run_constants(ctx); };
  }
  std::string replay_path;
  auto *replay = app.add_subcommand("replay", "rerun the command recorded in a manifest");
  replay->add_option("manifest", replay_path, "manifest.txt of an earlier run")->required();

  const bool color = !std::any_of(args.begin(), args.end(),
                                   [](const std::string &a) { return a == "--no-color"; }) &&
                     isatty(2);
  std::vector<std::string> argv_store = {"txn"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char *> argv;
  for (const auto &a : argv_store)
    argv.push_back(a.c_str());

  std::set<std::string> formats;
  try {
    app.parse(int(argv.size()), argv.data());
    formats = parse_formats(g.formats);
  } catch (const CLI::CallForHelp &e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp &e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ConfigError &e) {
    std::string msg = e.what();
    for (const auto &c : commands)
      if (msg.find(c->name + ".") != std::string::npos)
        msg += "; accepted keys for [" + c->name + "]: " + accepted_keys(*c);
    err << red("usage error: ", color) << msg << '\n';
    return kUsage;
  } catch (const CLI::ParseError &e) {
    err << red("usage error: ", color) << e.what() << '\n';
    if (e.get_exit_code() == 0)
      return kOk;
    err << "run 'txn --help' for the list of commands\n";
    return kUsage;
  }

  if (replay->parsed()) {
    std::ifstream is(replay_path);
    if (!is) {
      err << red("io error: ", color) << "cannot open " << replay_path << '\n';
      return kIo;
    }
    std::string line, command;
    while (std::getline(is, line))
      if (line.size() > 2 && line.front() == '[' && line.back() == ']') {
        command = line.substr(1, line.size() - 2);
        break;
      }
    if (command.empty()) {
      err << red("usage error: ", color) << replay_path << " has no [command] section\n";
      return kUsage;
    }
    std::vector<std::string> again = {"--config", replay_path};
    if (dir_opt->count() > 0)
      again.insert(again.end(), {"--output-dir", g.output_dir});
    if (g.no_color)
      again.push_back("--no-color");
    again.push_back(command);
    return run(again, out, err);
  }

  Command *cmd = nullptr;
  for (auto &c : commands)
    if (c->app->parsed())
      cmd = c.get();

  try {
    Context ctx{g, *cmd, fs::path(g.output_dir), out, formats, {}};
    for (const auto &f : formats)
      if (f != "csv" && cmd->name != "fieldmap")
        err << "note: format " << f << " applies to fieldmap only\n";
    cmd->body(ctx);
    write_manifest(ctx);
    for (const auto &w : ctx.written)
      out << "wrote " << (ctx.dir / w).string() << '\n';
    return kOk;
  } catch (const IoError &e) {
    err << red("io error: ", color) << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error &e) {
    err << red("io error: ", color) << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument &e) {
    err << red("usage error: ", color) << e.what() << '\n';
    return kUsage;
  } catch (const IntegrationFailure &e) {
    err << red("numeric failure: ", color) << e.what() << " (" << e.partial().times.size()
        << " samples reached)\n";
    return kNumeric;
  } catch (const std::exception &e) {
    err << red("numeric failure: ", color) << e.what() << '\n';
    return kNumeric;
  }
}

} // namespace txn::cli
