#include "txn/paths.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

namespace txn {

namespace {
constexpr double kPi = std::numbers::pi;
}

ExactAndApprox path_length(double r, double y) {
  if (!(r > 0.0))
    throw std::invalid_argument("path_length: distance must be positive");
  return {2.0 * std::hypot(0.5 * r, y), r + 2.0 * y * y / r};
}

PathEnsemble PathEnsemble::uniform(double distance, double wavelength, double half_width,
                                   int count) {
  if (count < 1)
    throw std::invalid_argument("uniform ensemble: need at least one path");
  PathEnsemble e;
  e.distance = distance;
  e.screen_x = 0.5 * distance;
  e.wavelength = wavelength;
  e.offsets.resize(std::size_t(count));
  for (int i = 0; i < count; ++i) {
    // filled from both ends so the set is exactly symmetric
    const double y = count == 1 ? 0.0 : half_width * (2.0 * i - (count - 1)) / double(count - 1);
    e.offsets[std::size_t(i)] = y;
  }
  for (int i = 0; i < count / 2; ++i)
    e.offsets[std::size_t(count - 1 - i)] = -e.offsets[std::size_t(i)];
  return e;
}

double PathEnsemble::geometric_length(double y) const {
  return std::hypot(screen_x, y) + std::hypot(distance - screen_x, y);
}

double PathEnsemble::optical_length(double y) const {
  const double l = geometric_length(y);
  return delay ? l + delay(y, l) : l;
}

PhasorResultant phasor_sum(const PathEnsemble &e, const PhasorOptions &opts) {
  if (!(e.wavelength > 0.0) || !(e.distance > 0.0))
    throw std::invalid_argument("phasor_sum: wavelength and distance must be positive");
  const std::size_t n = e.offsets.size();
  if (n == 0)
    throw std::invalid_argument("phasor_sum: empty ensemble");
  if (!e.weights.empty() && e.weights.size() != n)
    throw std::invalid_argument("phasor_sum: weights and offsets differ in length");
  if (!std::is_sorted(e.offsets.begin(), e.offsets.end()))
    throw std::invalid_argument("phasor_sum: offsets must be sorted ascending");
  if (opts.require_symmetric) {
    const double scale = std::max(std::abs(e.offsets.front()), std::abs(e.offsets.back()));
    for (std::size_t i = 0; i < n / 2; ++i)
      if (std::abs(e.offsets[i] + e.offsets[n - 1 - i]) > 1e-12 * scale)
        throw SamplingError("phasor_sum: offsets are not symmetric about the axis");
  }

  const double k = 2.0 * kPi / e.wavelength;
  // Phases are taken relative to the straight path and rotated back at the end,
  // which keeps them small and accurate at large distances.
  std::vector<double> rel(n);
  for (std::size_t j = 0; j < n; ++j)
    rel[j] = k * (e.optical_length(e.offsets[j]) - e.distance);

  PhasorResultant out;
  for (std::size_t j = 1; j < n; ++j)
    out.max_phase_step = std::max(out.max_phase_step, std::abs(rel[j] - rel[j - 1]));
  if (opts.check_sampling && out.max_phase_step >= kPi / 4.0) {
    std::ostringstream os;
    os << "phasor_sum: adjacent paths differ in phase by " << out.max_phase_step
       << " rad (limit pi/4); reduce the offset spacing";
    throw SamplingError(os.str());
  }

  const std::complex<double> carrier = std::polar(1.0, std::fmod(k * e.distance, 2.0 * kPi));
  out.arrows.resize(n);
  out.partial_sums.resize(n);
  std::complex<double> acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = e.weights.empty() ? 1.0 : e.weights[j];
    out.arrows[j] = std::polar(w, rel[j]) * carrier;
    acc += out.arrows[j];
    out.partial_sums[j] = acc;
    out.arrow_total += std::abs(w);
  }
  out.resultant = acc;
  out.amplitude = std::abs(acc);
  return out;
}

std::function<double(double, double)> equal_delay_lens(double distance) {
  return [distance](double, double length) { return distance - length; };
}

// memory bound, about 50x the default study
constexpr double kMaxRingPaths = 5e6;

double ring_theta_step(double distance, double wavelength, double theta_max) {
  // d(phase)/d(theta) = k r sin(theta) / cos^2(theta), largest at theta_max
  const double k = 2.0 * kPi / wavelength;
  const double c = std::cos(theta_max);
  const double slope = k * distance * std::sin(theta_max) / (c * c);
  return 0.9 * (kPi / 4.0) / slope;
}

PathEnsemble ring_ensemble(double distance, double wavelength, const RingSampling &s) {
  if (!(s.theta_max > 0.0 && s.theta_max < kPi / 2.0))
    throw std::invalid_argument("ring_ensemble: theta_max must lie in (0, pi/2)");
  const double step =
      s.theta_step > 0.0 ? s.theta_step : ring_theta_step(distance, wavelength, s.theta_max);
  const double wanted = s.theta_max / step;
  if (wanted > kMaxRingPaths) {
    std::ostringstream os;
    os << "ring_ensemble: resolving the phase at distance " << distance << " needs " << wanted
       << " paths per side (limit " << kMaxRingPaths << "); shrink the distance or grow the wavelength";
    throw SamplingError(os.str());
  }
  const long count = long(wanted);
  PathEnsemble e;
  e.distance = distance;
  e.screen_x = 0.5 * distance;
  e.wavelength = wavelength;
  e.offsets.resize(std::size_t(2 * count));
  e.weights.resize(std::size_t(2 * count));
  for (long j = 0; j < count; ++j) {
    const double th = (double(j) + 0.5) * step;
    const double y = e.screen_x * std::tan(th);
    const double w = kPi * std::sin(th) * step * std::exp(-(th * th) / (s.taper * s.taper));
    const auto up = std::size_t(count + j), down = std::size_t(count - 1 - j);
    e.offsets[up] = y;
    e.offsets[down] = -y;
    e.weights[up] = w;
    e.weights[down] = w;
  }
  return e;
}

std::pair<double, double> loglog_fit(const Eigen::VectorXd &x, const Eigen::VectorXd &y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_fit: need two or more matching samples");
  const Eigen::ArrayXd lx = x.array().log(), ly = y.array().log();
  const double mx = lx.mean(), my = ly.mean();
  const double sxy = ((lx - mx) * (ly - my)).sum(), sxx = (lx - mx).square().sum();
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

DistanceStudy amplitude_vs_distance(const std::vector<double> &distances, double wavelength,
                                    RingSampling sampling) {
  if (distances.size() < 2)
    throw std::invalid_argument("amplitude_vs_distance: need at least two distances");
  for (double r : distances)
    if (!(r > 0.0))
      throw std::invalid_argument("amplitude_vs_distance: distances must be positive");
  const double r_max = *std::max_element(distances.begin(), distances.end());
  const double r_min = *std::min_element(distances.begin(), distances.end());
  if (r_max < 10.0 * r_min)
    throw std::invalid_argument("amplitude_vs_distance: distances must span a decade");
  // fixed paths per unit angle for every distance
  if (!(sampling.theta_step > 0.0))
    sampling.theta_step = ring_theta_step(r_max, wavelength, sampling.theta_max);

  DistanceStudy out;
  out.theta_step = sampling.theta_step;
  const auto n = Eigen::Index(distances.size());
  out.distances.resize(n);
  out.amplitudes.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto e = ring_ensemble(distances[std::size_t(i)], wavelength, sampling);
    const auto res = phasor_sum(e);
    out.distances[i] = distances[std::size_t(i)];
    out.amplitudes[i] = res.amplitude;
    out.path_counts.push_back(long(e.offsets.size()));
  }
  std::tie(out.slope, out.intercept) = loglog_fit(out.distances, out.amplitudes);
  out.intensity_slope =
      loglog_fit(out.distances, Eigen::VectorXd(out.amplitudes.array().square())).first;
  return out;
}

ZoneAnalysis zone_analysis(const PathEnsemble &e) {
  const auto res = phasor_sum(e);
  ZoneAnalysis z;
  z.edge = zone_edge(e.distance, e.wavelength);
  const double norm2 = std::norm(res.resultant);
  if (!(norm2 > 0.0))
    throw std::domain_error("zone_analysis: resultant vanishes");

  // accumulate in order of increasing |y|
  std::vector<std::size_t> order(e.offsets.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(e.offsets[a]) < std::abs(e.offsets[b]);
  });
  auto projection = [&](std::complex<double> part) {
    return (part * std::conj(res.resultant)).real() / norm2;
  };
  std::complex<double> acc = 0.0, inner = 0.0;
  bool found = false;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double y = std::abs(e.offsets[order[i]]);
    acc += res.arrows[order[i]];
    if (y <= z.edge)
      inner = acc;
    // keep +y and -y together
    const bool group_end =
        i + 1 == order.size() || std::abs(e.offsets[order[i + 1]]) != y;
    if (!found && group_end && projection(acc) >= 0.8) {
      z.half_width_80 = y;
      found = true;
    }
  }
  z.width_ratio = z.half_width_80 / z.edge;
  z.inner_projection = projection(inner);
  z.outer_projection = projection(res.resultant - inner);
  z.outer_magnitude = std::abs(res.resultant - inner) / std::sqrt(norm2);
  return z;
}

double enhancement_factor(double r, double wavelength, double solid_angle) {
  if (!(r > 0.0 && wavelength > 0.0 && solid_angle > 0.0))
    throw std::invalid_argument("enhancement_factor: inputs must be positive");
  if (solid_angle > 4.0 * kPi)
    throw std::invalid_argument("enhancement_factor: solid angle exceeds 4 pi");
  return 8.0 * r / (kPi * wavelength) * solid_angle;
}

} // namespace txn
