#include "beamid/constants.hpp"

#include "beamid/errors.hpp"
#include "csv_util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

namespace beamid {

const char* to_string(CtVariant v) { return v == CtVariant::Literal ? "literal" : "corrected"; }

CtVariant parse_ct_variant(const std::string& s) {
  if (s == "literal") return CtVariant::Literal;
  if (s == "corrected") return CtVariant::Corrected;
  throw ConfigError("unknown C_T variant '" + s + "' (expected literal|corrected)");
}

double ct_value(double final_time, CtVariant variant) {
  const double T = final_time;
  // Literal text reads 1 + 3T/3.
  const double second = variant == CtVariant::Literal ? 1 + 3 * T / 3 : 1 + 2 * T / 3;
  return std::max(2 / T, second);
}

ConstantSet compute_constants(const ConstantInputs& in) {
  const auto& b = in.bounds;
  if (!(in.length > 0)) throw DomainError("beam length must be > 0");
  if (!(in.final_time > 0)) throw DomainError("final time must be > 0");
  if (!(b.mass_min > 0)) throw DomainError("rho_0 must be > 0");
  if (!(b.rigidity_min > 0)) throw DomainError("r_0 must be > 0");
  if (!(b.kv_min > 0)) throw DomainError("kappa_0 must be > 0");
  if (!(in.admissible_radius > 0)) throw DomainError("C_F must be > 0");

  const double l = in.length, T = in.final_time;
  const double rho0 = b.mass_min, r0 = b.rigidity_min, kappa0 = b.kv_min;

  ConstantSet c;
  c.length = l;
  c.final_time = T;
  c.rho0 = rho0;
  c.r0 = r0;
  c.kappa0 = kappa0;
  c.admissible_radius = in.admissible_radius;
  c.ct_variant = in.ct_variant;

  c.ce_sq = std::exp(T / rho0);
  c.c1_sq = 5 * l * rho0 / 3 * (c.ce_sq - 1);
  const double c1 = std::sqrt(c.c1_sq);
  c.c_l = c1 / std::sqrt(r0);
  c.c_j = (2 * c1 * in.admissible_radius / std::sqrt(r0) + in.theta0_norm + in.thetaL_norm) *
          c.c_l;

  auto lipschitz_gradient = [&](double c0_sq) {
    return std::sqrt((std::exp(T) - 1) / (2 * kappa0)) * l * l * std::sqrt(c0_sq) * c1;
  };
  const CtVariant other =
      in.ct_variant == CtVariant::Literal ? CtVariant::Corrected : CtVariant::Literal;
  c.c_t = ct_value(T, in.ct_variant);
  c.c0_sq = 20 * l * c.c_t / (3 * r0 * r0);
  c.l_g = lipschitz_gradient(c.c0_sq);
  c.c_t_alt = ct_value(T, other);
  c.c0_sq_alt = 20 * l * c.c_t_alt / (3 * r0 * r0);
  c.l_g_alt = lipschitz_gradient(c.c0_sq_alt);
  return c;
}

std::string ConstantSet::describe() const {
  std::ostringstream os;
  os.precision(10);
  const char* alt = ct_variant == CtVariant::Literal ? "corrected" : "literal";
  os << "C_e^2 = " << ce_sq << "  (exp(T/rho_0))\n"
     << "C_1^2 = " << c1_sq << "  ((5 l rho_0/3)(C_e^2-1))\n"
     << "C_L   = " << c_l << "  (C_1/sqrt(r_0))\n"
     << "C_J   = " << c_j << "  (C_F = " << admissible_radius << ")\n"
     << "C_T   = " << c_t << "  [" << to_string(ct_variant) << "]; " << alt << ": " << c_t_alt
     << '\n'
     << "C_0^2 = " << c0_sq << "  [" << to_string(ct_variant) << "]; " << alt << ": "
     << c0_sq_alt << '\n'
     << "L_G   = " << l_g << "  [" << to_string(ct_variant) << "]; " << alt << ": " << l_g_alt
     << '\n';
  return os.str();
}

void InequalityReport::add(std::string check, std::string scenario, double lhs, double rhs,
                           double slack) {
  checks.push_back({std::move(check), std::move(scenario), lhs, rhs,
                    holds_with_slack(lhs, rhs, slack)});
}

void InequalityReport::append(const InequalityReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

std::size_t InequalityReport::violations() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.pass; }));
}

void InequalityReport::write_csv(std::ostream& os) const {
  os << "check,scenario,lhs,rhs,pass\n";
  for (const auto& c : checks)
    os << c.check << ',' << c.scenario << ',' << detail::fmt_double(c.lhs) << ','
       << detail::fmt_double(c.rhs) << ',' << (c.pass ? 1 : 0) << '\n';
}

void InequalityReport::write_text(std::ostream& os) const {
  // Aggregate per check name, preserving first-seen order.
  std::vector<std::string> order;
  std::map<std::string, std::pair<int, int>> counts;  // pass, fail
  std::map<std::string, double> worst;                // max lhs/rhs
  for (const auto& c : checks) {
    if (!counts.count(c.check)) order.push_back(c.check);
    auto& pf = counts[c.check];
    (c.pass ? pf.first : pf.second)++;
    const double ratio = c.rhs > 0 ? c.lhs / c.rhs : (c.lhs > 0 ? INFINITY : 0.0);
    worst[c.check] = std::max(worst[c.check], ratio);
  }
  os << "checks: " << checks.size() << ", violations: " << violations() << '\n';
  for (const auto& name : order) {
    const auto& pf = counts[name];
    os << "  " << name << ": " << pf.first << " pass, " << pf.second
       << " fail, max lhs/rhs = " << worst[name] << '\n';
  }
  for (const auto& c : checks)
    if (!c.pass)
      os << "VIOLATION " << c.check << " [" << c.scenario << "]: lhs = " << detail::fmt_double(c.lhs)
         << " > rhs = " << detail::fmt_double(c.rhs) << '\n';
}

}  // namespace beamid
