#include "txn/experiments.hpp"

#include "txn/random.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace txn {

namespace {
constexpr double kPi = std::numbers::pi;
}

bool HbtGeometry::far_field() const { return distance >= 100.0 * std::max(d12, d_ab); }

double hbt_coincidence_rate(const HbtGeometry &g) {
  if (!(g.wavelength > 0.0 && g.distance > 0.0))
    throw std::invalid_argument("hbt: wavelength and distance must be positive");
  return 1.0 + std::cos(2.0 * kPi * g.d_ab * g.d12 / (g.wavelength * g.distance));
}

double hbt_fringe_period(const HbtGeometry &g) { return g.wavelength * g.distance / g.d12; }

double hbt_scanned_period(HbtGeometry g, double max_dab, int samples) {
  if (samples < 3 || !(max_dab > 0.0))
    throw std::invalid_argument("hbt scan: need a positive range and at least 3 samples");
  const double h = max_dab / double(samples - 1);
  std::vector<double> rate(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    g.d_ab = h * i;
    rate[std::size_t(i)] = hbt_coincidence_rate(g);
  }
  for (int i = 1; i + 1 < samples; ++i) {
    const double a = rate[std::size_t(i - 1)], b = rate[std::size_t(i)],
                 c = rate[std::size_t(i + 1)];
    if (b > a && b >= c) {
      const double denom = a - 2.0 * b + c;
      return h * (i + (denom == 0.0 ? 0.0 : 0.5 * (a - c) / denom));
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void PolarimeterPair::validate() const {
  auto ok = [](double major, double minor) {
    return minor >= 0.0 && minor <= major && major <= 1.0;
  };
  if (!ok(eff_major1, eff_minor1) || !ok(eff_major2, eff_minor2))
    throw std::invalid_argument("polarizer: need 0 <= eff_minor <= eff_major <= 1");
}

double fc_coincidence_ti(const PolarimeterPair &p) {
  p.validate();
  // half-angle form: exactly zero at phi = pi/2, where cos(phi)^2 is not
  const double c2 = 0.5 * (1.0 + std::cos(2.0 * p.phi()));
  return (p.eff_major1 * p.eff_minor2 + p.eff_minor1 * p.eff_major2) +
         (p.eff_major1 - p.eff_minor1) * (p.eff_major2 - p.eff_minor2) * c2;
}

MonteCarloEstimate fc_coincidence_classical(const PolarimeterPair &p, long samples,
                                            std::uint64_t seed) {
  p.validate();
  if (samples < 1)
    throw std::invalid_argument("fc classical: need at least one sample");
  Rng rng(seed);
  long hits = 0;
  auto pass = [](double major, double minor, double angle) {
    const double c = std::cos(angle);
    return major * c * c + minor * (1.0 - c * c);
  };
  for (long i = 0; i < samples; ++i) {
    const double axis = kPi * rng.uniform();
    const bool one = rng.bernoulli(pass(p.eff_major1, p.eff_minor1, axis - p.theta1));
    const bool two = rng.bernoulli(pass(p.eff_major2, p.eff_minor2, axis - p.theta2));
    hits += one && two;
  }
  constexpr double aligned = 3.0 / 8.0;
  MonteCarloEstimate e;
  e.samples = samples;
  e.raw = double(hits) / double(samples);
  e.value = e.raw / aligned;
  e.std_error = std::sqrt(e.raw * (1.0 - e.raw) / double(samples)) / aligned;
  return e;
}

std::vector<FcRow> fc_curve(const PolarimeterPair &base, const std::vector<double> &phi_values,
                            long samples, std::uint64_t seed) {
  std::vector<FcRow> rows;
  rows.reserve(phi_values.size());
  for (std::size_t i = 0; i < phi_values.size(); ++i) {
    PolarimeterPair p = base;
    p.theta2 = p.theta1 + phi_values[i];
    const auto mc = fc_coincidence_classical(p, samples, derive_seed(seed, i));
    rows.push_back({phi_values[i], fc_coincidence_ti(p), mc.value, mc.std_error});
  }
  return rows;
}

void EmitterStream::validate() const {
  if (!(window > 0.0 && window < mean_interval))
    throw std::invalid_argument("split: need 0 < window < mean_interval");
  if (!(dead_time >= 0.0 && dead_time < mean_interval))
    throw std::invalid_argument("split: need 0 <= dead_time < mean_interval");
  if (!(background_interval > 0.0))
    throw std::invalid_argument("split: background interval must be positive");
  if (!(duration > 0.0))
    throw std::invalid_argument("split: duration must be positive");
  if (!(p_loss >= 0.0 && p_loss <= 1.0))
    throw std::invalid_argument("split: p_loss must lie in [0, 1]");
  if (!(max_delay >= window && plateau_delay < max_delay))
    throw std::invalid_argument("split: need window <= plateau_delay < max_delay");
}

double split_photon_accidentals(const EmitterStream &s) {
  const double keep = 0.5 * (1.0 - s.p_loss);
  const double rp = keep / s.mean_interval, rb = keep / s.background_interval;
  // primary-primary pairs are at least dead_time apart
  const double pp = s.dead_time > 0.5 * s.window ? 0.0 : rp * rp;
  return (rb * rb + 2.0 * rp * rb + pp) * s.window * s.duration;
}

SplitPhotonResult split_photon_run(const EmitterStream &s) {
  s.validate();
  Rng rng(s.rng_seed);
  SplitPhotonResult out;
  std::vector<double> at_a, at_b;

  auto route = [&](double t) {
    const double u = rng.uniform();
    if (u < s.p_loss)
      ++out.lost;
    else if (u < s.p_loss + 0.5 * (1.0 - s.p_loss))
      at_a.push_back(t);
    else
      at_b.push_back(t);
  };

  const double wait = s.mean_interval - s.dead_time;
  for (double t = s.dead_time + rng.exponential(wait); t < s.duration;
       t += s.dead_time + rng.exponential(wait)) {
    ++out.primary_events;
    route(t);
  }
  for (double t = rng.exponential(s.background_interval); t < s.duration;
       t += rng.exponential(s.background_interval)) {
    ++out.background_events;
    route(t);
  }
  std::sort(at_a.begin(), at_a.end());
  std::sort(at_b.begin(), at_b.end());
  out.detected_a = long(at_a.size());
  out.detected_b = long(at_b.size());

  const long half_bins = std::lround(s.max_delay / s.window);
  const long nbins = 2 * half_bins + 1;
  out.delays.resize(nbins);
  out.counts = Eigen::VectorXd::Zero(nbins);
  for (long k = 0; k < nbins; ++k)
    out.delays[k] = double(k - half_bins) * s.window;

  const double reach = (double(half_bins) + 0.5) * s.window;
  std::size_t start = 0;
  for (double ta : at_a) {
    while (start < at_b.size() && at_b[start] < ta - reach)
      ++start;
    for (std::size_t j = start; j < at_b.size() && at_b[j] < ta + reach; ++j) {
      const long k = long(std::floor((at_b[j] - ta) / s.window + 0.5)) + half_bins;
      if (k >= 0 && k < nbins)
        out.counts[k] += 1.0;
    }
  }

  out.zero_bin = out.counts[half_bins];
  double plateau = 0.0;
  long plateau_bins = 0;
  for (long k = 0; k < nbins; ++k)
    if (std::abs(out.delays[k]) >= s.plateau_delay) {
      plateau += out.counts[k];
      ++plateau_bins;
    }
  out.plateau = plateau_bins > 0 ? plateau / double(plateau_bins) : 0.0;
  out.accidental_oracle = split_photon_accidentals(s);
  out.degenerate = at_a.empty() && at_b.empty();
  return out;
}

} // namespace txn
