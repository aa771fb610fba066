#include "beamid/measurements.hpp"

#include "beamid/banded.hpp"
#include "beamid/errors.hpp"
#include "csv_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>

namespace beamid {

MeasurementSeries add_noise(const SpaceTimeGrid& grid, const MeasurementSeries& series,
                            const NoiseSpec& spec) {
  if (!(spec.relative_level >= 0)) throw DomainError("noise level must be >= 0");
  MeasurementSeries out;
  out.theta0 = series.theta0;
  out.thetaL = series.thetaL;
  out.check(grid);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double total_sq = 0;
  for (Eigen::VectorXd* ch : {&out.theta0, &out.thetaL}) {
    Eigen::VectorXd e(ch->size());
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = normal(rng);
    const double target = spec.relative_level * time_norm(grid, *ch);
    const double en = time_norm(grid, e);
    if (target > 0 && en > 0) {
      *ch += (target / en) * e;
      total_sq += target * target;
    }
  }
  out.smoothness = Smoothness::Raw;
  out.noise_norm = std::sqrt(total_sq);
  return out;
}

namespace {

struct SplineFit {
  Eigen::VectorXd values;
  Eigen::VectorXd derivative;
};

// Reinsch's form of the natural cubic smoothing spline on uniform knots:
// (R + lambda Q^T Q) gamma = Q^T y, g = y - lambda Q gamma, gamma the
// second derivatives at the interior knots.
SplineFit smoothing_spline(const Eigen::VectorXd& y, double h, double lambda) {
  const int n = static_cast<int>(y.size());
  const int m = n - 2;
  SymmetricBandMatrix a(m, 2);
  const double ih2 = 1 / (h * h);
  for (int j = 0; j < m; ++j) {
    a.add(j, j, 2 * h / 3 + lambda * 6 * ih2);
    if (j + 1 < m) a.add(j + 1, j, h / 6 - lambda * 4 * ih2);
    if (j + 2 < m) a.add(j + 2, j, lambda * ih2);
  }
  Eigen::VectorXd rhs(m);
  for (int j = 0; j < m; ++j) rhs(j) = (y(j) - 2 * y(j + 1) + y(j + 2)) / h;
  const Eigen::VectorXd gamma = BandCholesky(a).solve(rhs);

  Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
  full.segment(1, m) = gamma;
  SplineFit fit;
  fit.values = y;
  for (int i = 0; i < n; ++i) {
    double qg = 0;
    if (i < m) qg += gamma(i) / h;
    if (i >= 1 && i - 1 < m) qg -= 2 * gamma(i - 1) / h;
    if (i >= 2) qg += gamma(i - 2) / h;
    fit.values(i) -= lambda * qg;
  }
  const auto& g = fit.values;
  fit.derivative.resize(n);
  for (int i = 0; i + 1 < n; ++i)
    fit.derivative(i) = (g(i + 1) - g(i)) / h - h * (2 * full(i) + full(i + 1)) / 6;
  fit.derivative(n - 1) = (g(n - 1) - g(n - 2)) / h + h * (full(n - 2) + 2 * full(n - 1)) / 6;
  return fit;
}

}  // namespace

double second_difference_seminorm(const Eigen::VectorXd& y) {
  double s = 0;
  for (Eigen::Index i = 1; i + 1 < y.size(); ++i) {
    const double d = y(i - 1) - 2 * y(i) + y(i + 1);
    s += d * d;
  }
  return s;
}

SmoothingResult smooth_to_h1(const SpaceTimeGrid& grid, const MeasurementSeries& series,
                             std::optional<double> lambda) {
  series.check(grid);
  if (lambda && !(*lambda >= 0)) throw DomainError("smoothing parameter must be >= 0");
  const double h = grid.dt();

  auto fit = [&](double lam) {
    auto a = smoothing_spline(series.theta0, h, lam);
    auto b = smoothing_spline(series.thetaL, h, lam);
    const double r = std::sqrt(time_inner(grid, a.values - series.theta0, a.values - series.theta0) +
                               time_inner(grid, b.values - series.thetaL, b.values - series.thetaL));
    return std::tuple{std::move(a), std::move(b), r};
  };

  double lam = 0;
  if (lambda) {
    lam = *lambda;
  } else {
    if (!series.noise_norm)
      throw PreconditionError(
          "smoothing parameter not given and the series carries no noise level to choose it");
    const double target = *series.noise_norm;
    if (target > 0) {
      // Residual grows monotonically with lambda; bisect on log(lambda).
      double lo = -30, hi = 30;
      if (std::get<2>(fit(std::pow(10.0, hi))) < target) {
        warn("noise level exceeds the misfit of the smoothest spline; using the largest lambda");
        lo = hi;
      } else {
        for (int k = 0; k < 200 && hi - lo > 1e-10; ++k) {
          const double mid = 0.5 * (lo + hi);
          (std::get<2>(fit(std::pow(10.0, mid))) < target ? lo : hi) = mid;
        }
      }
      lam = std::pow(10.0, lo);
    }
  }

  auto [a, b, r] = fit(lam);
  SmoothingResult res;
  res.lambda = lam;
  res.residual = r;
  res.series.theta0 = std::move(a.values);
  res.series.thetaL = std::move(b.values);
  res.series.dtheta0 = std::move(a.derivative);
  res.series.dthetaL = std::move(b.derivative);
  res.series.smoothness = Smoothness::H1Smoothed;
  res.series.noise_norm = series.noise_norm;
  return res;
}

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::MovingGaussian: return "moving_gaussian";
    case ScenarioKind::Modal: return "modal";
    case ScenarioKind::Csv: return "csv";
    case ScenarioKind::Manufactured: return "manufactured";
    case ScenarioKind::Zero: return "zero";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(const std::string& s) {
  for (auto k : {ScenarioKind::MovingGaussian, ScenarioKind::Modal, ScenarioKind::Csv,
                 ScenarioKind::Manufactured, ScenarioKind::Zero})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown scenario kind '" + s +
                    "' (expected moving_gaussian|modal|csv|manufactured|zero)");
}

LoadField manufactured_load(const SpaceTimeGrid& grid, double mass, double damping,
                            double tension, double rigidity, double kv) {
  const double k = std::numbers::pi / grid.length();
  const double k2 = k * k, k4 = k2 * k2;
  return LoadField::sample(grid, [&](double x, double t) {
    return (2 * mass + 2 * damping * t + 2 * kv * k4 * t + (tension * k2 + rigidity * k4) * t * t) *
           std::sin(k * x);
  });
}

Eigen::MatrixXd manufactured_solution(const SpaceTimeGrid& grid) {
  const double k = std::numbers::pi / grid.length();
  return LoadField::sample(grid, [&](double x, double t) { return t * t * std::sin(k * x); })
      .values();
}

namespace {

double constant_value(const Eigen::VectorXd& v, const char* name) {
  const double lo = v.minCoeff(), hi = v.maxCoeff();
  if (hi - lo > 1e-12 * std::max(std::abs(hi), 1.0))
    throw DomainError(std::string("manufactured load needs a constant ") + name + " field");
  return lo;
}

}  // namespace

Scenario generate_scenario(const ScenarioParams& p, const BeamSystem& system) {
  const auto& g = system.grid();
  const double l = g.length(), T = g.final_time();
  LoadField truth(g);
  switch (p.kind) {
    case ScenarioKind::Zero:
      break;
    case ScenarioKind::MovingGaussian: {
      const double v = p.speed.value_or(l / T);
      const double s = p.width > 0 ? p.width : 2 * g.h();
      if (p.width < 0) throw DomainError("moving Gaussian width must be >= 0");
      const double end = p.start + v * T;
      if (p.start < 0 || p.start > l || end < 0 || end > l) {
        if (p.clamp)
          warn("vehicle path leaves the beam; centre clamped to the nearest end");
        else
          warn("vehicle path leaves the beam; load truncated at the supports");
      }
      truth = LoadField::sample(g, [&](double x, double t) {
        double c = p.start + v * t;
        if (p.clamp) c = std::clamp(c, 0.0, l);
        const double z = x - c;
        return p.amplitude * std::exp(-z * z / (2 * s * s));
      });
      break;
    }
    case ScenarioKind::Modal: {
      if (p.space_mode < 1 || p.time_mode < 1) throw DomainError("mode numbers must be >= 1");
      const double pi = std::numbers::pi;
      truth = LoadField::sample(g, [&](double x, double t) {
        return p.amplitude * std::sin(p.space_mode * pi * x / l) * std::sin(p.time_mode * pi * t / T);
      });
      break;
    }
    case ScenarioKind::Csv: {
      std::ifstream in(p.csv_path);
      if (!in) throw ConfigError("cannot open load CSV '" + p.csv_path + "'");
      truth = read_load_csv(in, g);
      break;
    }
    case ScenarioKind::Manufactured: {
      const auto& c = system.coefficients();
      truth = manufactured_load(g, constant_value(c.mass, "mass"), constant_value(c.damping, "damping"),
                                constant_value(c.tension, "tension"),
                                constant_value(c.rigidity, "rigidity"), constant_value(c.kv, "kv"));
      break;
    }
  }
  auto clean = solve_forward(system, truth).outputs;
  return Scenario{std::move(truth), std::move(clean)};
}

void write_measurements_csv(std::ostream& os, const SpaceTimeGrid& grid,
                            const MeasurementSeries& s) {
  s.check(grid);
  os << "t,theta0,thetaL\n";
  for (int n = 0; n < grid.n_times(); ++n)
    os << detail::fmt_double(grid.t(n)) << ',' << detail::fmt_double(s.theta0(n)) << ','
       << detail::fmt_double(s.thetaL(n)) << '\n';
}

MeasurementSeries read_measurements_csv(std::istream& is, const SpaceTimeGrid& grid) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("measurement CSV is empty");
  auto m = MeasurementSeries::zeros(grid);
  int n = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto tok = detail::split_csv_line(line);
    if (tok.size() != 3) throw InputError("measurement CSV rows must be `t,theta0,thetaL`");
    if (n >= grid.n_times()) throw DimensionError("measurement CSV has more rows than time instants");
    const double t = detail::parse_double(tok[0], "measurement CSV");
    if (std::abs(t - grid.t(n)) > 1e-9 * grid.final_time())
      throw DimensionError("measurement CSV time " + std::string(tok[0]) +
                           " does not match the grid instant " + detail::fmt_double(grid.t(n)));
    m.theta0(n) = detail::parse_double(tok[1], "measurement CSV");
    m.thetaL(n) = detail::parse_double(tok[2], "measurement CSV");
    ++n;
  }
  if (n != grid.n_times()) throw DimensionError("measurement CSV has fewer rows than time instants");
  return m;
}

void write_noise_metadata(std::ostream& os, const NoiseSpec& spec, const MeasurementSeries& noisy) {
  os << "seed=" << spec.seed << '\n'
     << "delta_rel=" << detail::fmt_double(spec.relative_level) << '\n'
     << "realized_delta=" << detail::fmt_double(noisy.noise_norm.value_or(0)) << '\n';
}

}  // namespace beamid
