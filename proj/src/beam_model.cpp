#include "beamid/beam_model.hpp"

#include "beamid/errors.hpp"
#include "csv_util.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace beamid {

SpaceTimeGrid::SpaceTimeGrid(double length, double final_time, int n_elements, int n_steps)
    : length_(length), final_time_(final_time), n_elements_(n_elements), n_steps_(n_steps) {
  if (!(length > 0) || !std::isfinite(length)) throw DomainError("grid length must be > 0");
  if (!(final_time > 0) || !std::isfinite(final_time))
    throw DomainError("grid final time must be > 0");
  if (n_elements < 4) throw DomainError("grid needs at least 4 elements");
  if (n_steps < 4) throw DomainError("grid needs at least 4 time steps");
}

static Eigen::VectorXd trapezoid_weights(int n_points, double spacing) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n_points, spacing);
  w(0) *= 0.5;
  w(n_points - 1) *= 0.5;
  return w;
}

Eigen::VectorXd SpaceTimeGrid::space_weights() const { return trapezoid_weights(n_nodes(), h()); }

Eigen::VectorXd SpaceTimeGrid::time_weights() const { return trapezoid_weights(n_times(), dt()); }

SpaceTimeGrid SpaceTimeGrid::refined(int factor) const {
  return SpaceTimeGrid(length_, final_time_, n_elements_ * factor, n_steps_ * factor);
}

CoefficientSet CoefficientSet::constant(int n_nodes, double mass, double damping, double tension,
                                        double rigidity, double kv,
                                        const CoefficientBounds& bounds) {
  CoefficientSet c;
  c.mass = Eigen::VectorXd::Constant(n_nodes, mass);
  c.damping = Eigen::VectorXd::Constant(n_nodes, damping);
  c.tension = Eigen::VectorXd::Constant(n_nodes, tension);
  c.rigidity = Eigen::VectorXd::Constant(n_nodes, rigidity);
  c.kv = Eigen::VectorXd::Constant(n_nodes, kv);
  c.bounds = bounds;
  return c;
}

CoefficientSet CoefficientSet::constant_tight(int n_nodes, double mass, double damping,
                                              double tension, double rigidity, double kv) {
  CoefficientBounds b{mass, mass, damping, damping, tension, tension, rigidity, rigidity, kv, kv};
  return constant(n_nodes, mass, damping, tension, rigidity, kv, b);
}

CoefficientSet CoefficientSet::scaled(double factor) const {
  CoefficientSet c = *this;
  c.mass *= factor;
  c.damping *= factor;
  c.tension *= factor;
  c.rigidity *= factor;
  c.kv *= factor;
  auto& b = c.bounds;
  for (double* v : {&b.mass_min, &b.mass_max, &b.damping_min, &b.damping_max, &b.tension_min,
                    &b.tension_max, &b.rigidity_min, &b.rigidity_max, &b.kv_min, &b.kv_max})
    *v *= factor;
  return c;
}

std::string ValidationReport::describe() const {
  if (ok()) return "coefficients admissible";
  std::ostringstream os;
  os << violations.size() << " bound violation(s):";
  std::size_t shown = 0;
  for (const auto& v : violations) {
    if (++shown > 8) {
      os << " ...";
      break;
    }
    os << ' ' << v.field;
    if (v.node >= 0) os << "[node " << v.node << "]=" << v.value;
    os << " not in [" << v.lower << ", " << v.upper << "];";
  }
  return os.str();
}

namespace {

struct FieldRule {
  const char* name;
  const Eigen::VectorXd* values;
  double lower;
  double upper;
  bool strictly_positive;
};

}  // namespace

ValidationReport validate_coefficients(const CoefficientSet& c) {
  const auto n = c.mass.size();
  if (c.damping.size() != n || c.tension.size() != n || c.rigidity.size() != n ||
      c.kv.size() != n)
    throw DimensionError("coefficient fields have mismatched lengths");

  const auto& b = c.bounds;
  const FieldRule rules[] = {
      {"rho_A", &c.mass, b.mass_min, b.mass_max, true},
      {"mu", &c.damping, b.damping_min, b.damping_max, false},
      {"T_r", &c.tension, b.tension_min, b.tension_max, false},
      {"r", &c.rigidity, b.rigidity_min, b.rigidity_max, true},
      {"kappa", &c.kv, b.kv_min, b.kv_max, true},
  };

  ValidationReport report;
  for (const auto& rule : rules) {
    const bool lower_ok = rule.strictly_positive ? rule.lower > 0 : rule.lower >= 0;
    if (!lower_ok || !(rule.lower <= rule.upper) || !std::isfinite(rule.upper))
      report.violations.push_back({std::string(rule.name) + " bounds", -1, 0, rule.lower,
                                   rule.upper});
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = (*rule.values)(i);
      if (!(v >= rule.lower && v <= rule.upper) || (rule.strictly_positive && !(v > 0)))
        report.violations.push_back(
            {rule.name, static_cast<int>(i), v, rule.lower, rule.upper});
    }
  }
  return report;
}

std::vector<std::string> bounds_slack_warnings(const CoefficientSet& c) {
  std::vector<std::string> out;
  auto check = [&](const char* name, const Eigen::VectorXd& f, double declared) {
    if (f.size() == 0 || declared <= 0) return;
    const double sampled = f.minCoeff();
    if (sampled > 10 * declared) {
      std::ostringstream os;
      os << "declared lower bound of " << name << " (" << declared
         << ") is more than 10x below the sampled minimum (" << sampled << ")";
      out.push_back(os.str());
    }
  };
  check("rho_A", c.mass, c.bounds.mass_min);
  check("r", c.rigidity, c.bounds.rigidity_min);
  check("kappa", c.kv, c.bounds.kv_min);
  return out;
}

LoadField::LoadField(const SpaceTimeGrid& grid)
    : grid_(grid), values_(Eigen::MatrixXd::Zero(grid.n_nodes(), grid.n_times())) {}

LoadField::LoadField(const SpaceTimeGrid& grid, Eigen::MatrixXd values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.rows() != grid.n_nodes() || values_.cols() != grid.n_times())
    throw DimensionError("load field shape does not match the grid");
}

LoadField& LoadField::operator+=(const LoadField& other) {
  if (!(grid_ == other.grid_)) throw DimensionError("load fields live on different grids");
  values_ += other.values_;
  return *this;
}

LoadField& LoadField::operator-=(const LoadField& other) {
  if (!(grid_ == other.grid_)) throw DimensionError("load fields live on different grids");
  values_ -= other.values_;
  return *this;
}

LoadField& LoadField::operator*=(double s) {
  values_ *= s;
  return *this;
}

double spacetime_inner(const SpaceTimeGrid& grid, const Eigen::MatrixXd& a,
                       const Eigen::MatrixXd& b) {
  if (a.rows() != grid.n_nodes() || a.cols() != grid.n_times() || b.rows() != a.rows() ||
      b.cols() != a.cols())
    throw DimensionError("space-time field shape does not match the grid");
  const Eigen::VectorXd wx = grid.space_weights();
  const Eigen::VectorXd wt = grid.time_weights();
  return wx.dot(a.cwiseProduct(b) * wt);
}

double spacetime_inner(const LoadField& a, const LoadField& b) {
  if (!(a.grid() == b.grid())) throw DimensionError("load fields live on different grids");
  return spacetime_inner(a.grid(), a.values(), b.values());
}

double l2_norm_spacetime(const LoadField& f) { return std::sqrt(spacetime_inner(f, f)); }

LoadField project_admissible(const LoadField& f, double radius_sq) {
  if (!(radius_sq > 0)) throw DomainError("admissible radius C_F must be > 0");
  const double norm_sq = spacetime_inner(f, f);
  if (norm_sq <= radius_sq) return f;
  return std::sqrt(radius_sq / norm_sq) * f;
}

MeasurementSeries MeasurementSeries::zeros(const SpaceTimeGrid& grid) {
  MeasurementSeries m;
  m.theta0 = Eigen::VectorXd::Zero(grid.n_times());
  m.thetaL = Eigen::VectorXd::Zero(grid.n_times());
  return m;
}

void MeasurementSeries::check(const SpaceTimeGrid& grid) const {
  const auto n = grid.n_times();
  if (theta0.size() != n || thetaL.size() != n)
    throw DimensionError("measurement series length does not match the time grid");
  if (!theta0.allFinite() || !thetaL.allFinite())
    throw InputError("measurement series contain non-finite values");
  if (smoothness == Smoothness::H1Smoothed) {
    if (!dtheta0 || !dthetaL)
      throw PreconditionError("H1-smoothed measurements must carry derivative series");
    if (dtheta0->size() != n || dthetaL->size() != n)
      throw DimensionError("derivative series length does not match the time grid");
    if (!dtheta0->allFinite() || !dthetaL->allFinite())
      throw InputError("derivative series contain non-finite values");
  }
}

double time_inner(const SpaceTimeGrid& grid, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != grid.n_times() || b.size() != grid.n_times())
    throw DimensionError("time series length does not match the time grid");
  return grid.time_weights().dot(a.cwiseProduct(b));
}

double time_norm(const SpaceTimeGrid& grid, const Eigen::VectorXd& a) {
  return std::sqrt(time_inner(grid, a, a));
}

void write_coefficient_csv(std::ostream& os, const SpaceTimeGrid& grid,
                           const Eigen::VectorXd& field, const std::string& name) {
  if (field.size() != grid.n_nodes()) throw DimensionError("coefficient field length mismatch");
  os << "x," << name << '\n';
  for (int i = 0; i < grid.n_nodes(); ++i)
    os << detail::fmt_double(grid.x(i)) << ',' << detail::fmt_double(field(i)) << '\n';
}

Eigen::VectorXd read_coefficient_csv(std::istream& is, const SpaceTimeGrid& grid) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("coefficient CSV is empty");
  Eigen::VectorXd field(grid.n_nodes());
  int row = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    auto tok = detail::split_csv_line(line);
    if (tok.size() != 2) throw InputError("coefficient CSV rows must be `x,value`");
    if (row >= grid.n_nodes()) throw DimensionError("coefficient CSV has more rows than nodes");
    const double x = detail::parse_double(tok[0], "coefficient CSV");
    if (std::abs(x - grid.x(row)) > 1e-9 * grid.length())
      throw DimensionError("coefficient CSV x column does not match grid node " +
                           std::to_string(row));
    field(row++) = detail::parse_double(tok[1], "coefficient CSV");
  }
  if (row != grid.n_nodes()) throw DimensionError("coefficient CSV has fewer rows than nodes");
  return field;
}

void write_load_csv(std::ostream& os, const LoadField& f, const std::string& name) {
  const auto& g = f.grid();
  os << "x,t," << name << '\n';
  for (int n = 0; n < g.n_times(); ++n)
    for (int i = 0; i < g.n_nodes(); ++i)
      os << detail::fmt_double(g.x(i)) << ',' << detail::fmt_double(g.t(n)) << ','
         << detail::fmt_double(f(i, n)) << '\n';
}

LoadField read_load_csv(std::istream& is, const SpaceTimeGrid& grid) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("load CSV is empty");
  LoadField f(grid);
  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(grid.n_nodes(), grid.n_times());
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    auto tok = detail::split_csv_line(line);
    if (tok.size() != 3) throw InputError("load CSV rows must be `x,t,value`");
    const double x = detail::parse_double(tok[0], "load CSV");
    const double t = detail::parse_double(tok[1], "load CSV");
    const long i = std::lround(x / grid.h());
    const long n = std::lround(t / grid.dt());
    if (i < 0 || i >= grid.n_nodes() || n < 0 || n >= grid.n_times() ||
        std::abs(x - grid.x(int(i))) > 1e-9 * grid.length() ||
        std::abs(t - grid.t(int(n))) > 1e-9 * grid.final_time())
      throw DimensionError("load CSV point (" + std::string(tok[0]) + ", " + std::string(tok[1]) +
                           ") is not a grid point");
    f.values()(i, n) = detail::parse_double(tok[2], "load CSV");
    seen(i, n) = 1;
  }
  if (seen.minCoeff() == 0) throw DimensionError("load CSV does not cover every grid point");
  return f;
}

}  // namespace beamid
