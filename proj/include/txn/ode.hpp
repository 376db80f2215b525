#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace txn {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-13;
  double initial_step = 0.0; // 0 selects automatically
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 10'000'000;
};

enum class OdeStatus { Success, StepUnderflow, TooManySteps, Stopped };

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
  double min_step = std::numeric_limits<double>::infinity();
  double max_step = 0.0;
};

template <typename Scalar, int Dim>
struct OdeSolution {
  using State = Eigen::Matrix<Scalar, Dim, 1>;
  std::vector<Scalar> times;
  std::vector<State> states;
  OdeStatus status = OdeStatus::Success;
  OdeStats stats;
  std::string message;
  bool ok() const { return status == OdeStatus::Success; }
};

/// Dormand-Prince 5(4) with the Hairer continuous extension for dense output.
/// Deterministic for identical inputs.
template <typename Scalar, int Dim = Eigen::Dynamic>
class DormandPrince {
public:
  using State = Eigen::Matrix<Scalar, Dim, 1>;

  explicit DormandPrince(OdeOptions opts = {}) : opts_(opts) {}

  /// Integrates y' = f(t, y) from (t0, y0) and reports the solution at each of
  /// the sorted `samples` (all >= t0). On failure the solution holds the
  /// samples reached so far.
  template <class Rhs>
  OdeSolution<Scalar, Dim> solve(Rhs &&f, Scalar t0, const State &y0,
                                 std::span<const Scalar> samples) const {
    OdeSolution<Scalar, Dim> sol;
    if (samples.empty())
      return sol;
    std::size_t next = 0;
    while (next < samples.size() && samples[next] <= t0) {
      sol.times.push_back(samples[next]);
      sol.states.push_back(y0);
      ++next;
    }
    if (next == samples.size())
      return sol;
    const Scalar t_end = samples.back();
    run(f, t0, y0, t_end, sol.stats, sol.status, sol.message,
        [&](const Step &s) {
          while (next < samples.size() && samples[next] <= s.t1) {
            sol.times.push_back(samples[next]);
            sol.states.push_back(s.interpolate(samples[next]));
            ++next;
          }
          return true;
        });
    return sol;
  }

  /// Accepted step with its dense-output polynomial.
  struct Step {
    Scalar t0, t1, h;
    State y0, y1;
    State r2, r3, r4, r5;

    State interpolate(Scalar t) const {
      if (t == t1)
        return y1;
      const Scalar s = (t - t0) / h, s1 = Scalar(1) - s;
      return y0 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
    }
  };

  /// Steps from t0 toward t_end calling observer(step) after every accepted
  /// step; the observer returns false to stop early.
  template <class Rhs, class Observer>
  OdeStatus integrate(Rhs &&f, Scalar t0, const State &y0, Scalar t_end, Observer &&observer,
                      OdeStats *stats = nullptr, std::string *message = nullptr) const {
    OdeStats local;
    OdeStatus status = OdeStatus::Success;
    std::string msg;
    run(f, t0, y0, t_end, local, status, msg, observer);
    if (stats)
      *stats = local;
    if (message)
      *message = msg;
    return status;
  }

private:
  OdeOptions opts_;

  Scalar error_norm(const State &err, const State &y0, const State &y1) const {
    Scalar acc(0);
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const Scalar sc = Scalar(opts_.atol) +
                        Scalar(opts_.rtol) * std::max(std::abs(y0[i]), std::abs(y1[i]));
      const Scalar e = err[i] / sc;
      acc += e * e;
    }
    return std::sqrt(acc / Scalar(err.size()));
  }

  template <class Rhs, class Observer>
  void run(Rhs &f, Scalar t0, const State &y0, Scalar t_end, OdeStats &stats, OdeStatus &status,
           std::string &message, Observer &&observer) const {
    // Butcher tableau
    constexpr Scalar c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr Scalar a21 = 1.0 / 5;
    constexpr Scalar a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr Scalar a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr Scalar a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr Scalar a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr Scalar a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                     a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    constexpr Scalar e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // dense output
    constexpr Scalar d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                     d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                     d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

    Scalar t = t0;
    State y = y0;
    State k1 = f(t, y);
    stats.evaluations = 1;
    const Scalar span = t_end - t0;
    if (!(span > Scalar(0))) {
      status = OdeStatus::Success;
      return;
    }
    Scalar h = opts_.initial_step > 0 ? Scalar(opts_.initial_step) : initial_step(f, t, y, k1, stats);
    h = std::min<Scalar>(h, Scalar(opts_.max_step));
    long steps = 0;
    while (t < t_end) {
      if (++steps > opts_.max_steps) {
        status = OdeStatus::TooManySteps;
        message = "step budget exhausted at t = " + std::to_string(double(t));
        return;
      }
      const Scalar min_h = Scalar(16) * std::numeric_limits<Scalar>::epsilon() *
                           std::max<Scalar>(std::abs(t), std::abs(span));
      if (h < min_h) {
        status = OdeStatus::StepUnderflow;
        message = "step size underflow at t = " + std::to_string(double(t));
        return;
      }
      bool last = false;
      if (t + h >= t_end) {
        h = t_end - t;
        last = true;
      }
      const State k2 = f(t + c2 * h, State(y + h * (a21 * k1)));
      const State k3 = f(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
      const State k4 = f(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
      const State k5 = f(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
      const State k6 =
          f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
      const State y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      const State k7 = f(t + h, y1);
      stats.evaluations += 6;
      const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const Scalar en = error_norm(err, y, y1);
      if (!std::isfinite(double(en))) {
        ++stats.rejected;
        h *= Scalar(0.1);
        continue;
      }
      if (en <= Scalar(1)) {
        Step s;
        s.t0 = t;
        s.t1 = last ? t_end : t + h;
        s.h = h;
        s.y0 = y;
        s.y1 = y1;
        s.r2 = y1 - y;
        s.r3 = h * k1 - s.r2;
        s.r4 = s.r2 - h * k7 - s.r3;
        s.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        ++stats.accepted;
        stats.min_step = std::min<double>(stats.min_step, double(h));
        stats.max_step = std::max<double>(stats.max_step, double(h));
        t = s.t1;
        y = y1;
        k1 = k7;
        if (!observer(s)) {
          status = OdeStatus::Stopped;
          return;
        }
        if (last)
          break;
        const Scalar fac = en > Scalar(0) ? Scalar(0.9) * std::pow(en, Scalar(-0.2)) : Scalar(10);
        h *= std::clamp<Scalar>(fac, Scalar(0.2), Scalar(10));
      } else {
        ++stats.rejected;
        h *= std::max<Scalar>(Scalar(0.2), Scalar(0.9) * std::pow(en, Scalar(-0.2)));
      }
      h = std::min<Scalar>(h, Scalar(opts_.max_step));
    }
    status = OdeStatus::Success;
  }

  template <class Rhs>
  Scalar initial_step(Rhs &f, Scalar t, const State &y, const State &k1, OdeStats &stats) const {
    // Hairer-Wanner starting step heuristic
    State sc = y;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      sc[i] = Scalar(opts_.atol) + Scalar(opts_.rtol) * std::abs(y[i]);
    const Scalar d0 = std::sqrt((y.array() / sc.array()).square().mean());
    const Scalar d1 = std::sqrt((k1.array() / sc.array()).square().mean());
    Scalar h0 = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5)) ? Scalar(1e-6) : Scalar(0.01) * d0 / d1;
    const State y1 = y + h0 * k1;
    const State k2 = f(t + h0, y1);
    ++stats.evaluations;
    const Scalar d2 = std::sqrt(((k2 - k1).array() / sc.array()).square().mean()) / h0;
    const Scalar dm = std::max(d1, d2);
    const Scalar h1 = dm <= Scalar(1e-15) ? std::max(Scalar(1e-6), h0 * Scalar(1e-3))
                                          : std::pow(Scalar(0.01) / dm, Scalar(0.2));
    return std::min(Scalar(100) * h0, h1);
  }
};

} // namespace txn
