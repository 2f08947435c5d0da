#include "sbtrans/problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sbtrans {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kViscA = 0.954;
constexpr double kViscB = 27.93 * 0.028;
}  // namespace

void validate(const CoefficientSet& c) {
  if (!(c.mu_l > 0.0) || !(c.mu_l <= c.mu_u))
    throw std::invalid_argument("CoefficientSet: need 0 < mu_l <= mu_u");
  if (c.sigma < 0.0) throw std::invalid_argument("CoefficientSet: sigma must be >= 0");
  if (c.alpha < 0.0) throw std::invalid_argument("CoefficientSet: alpha must be >= 0");
  if (!(c.phi > 0.0)) throw std::invalid_argument("CoefficientSet: phi must be > 0");
  if (c.diffusion_floor < 0.0)
    throw std::invalid_argument("CoefficientSet: diffusion floor must be >= 0");
  if (!c.D1 || !c.D2) throw std::invalid_argument("CoefficientSet: D1/D2 not set");
}

double viscosity(const CoefficientSet& c, double concentration) {
  return c.viscosity_a * std::exp(c.viscosity_b * concentration);
}

std::pair<double, double> diffusion(const CoefficientSet& c, double x, double y, double t) {
  return {c.D1(x, y, t), c.D2(x, y, t)};
}

ExactSolution make_trig_exact(int pu, int pp, int pc) {
  auto powi = [](double t, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= t;
    return r;
  };
  ExactSolution e;
  e.eval = [=](double x, double y, double t, ExactValues& v) {
    const double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
    const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
    const double s2x = 2.0 * sx * cx, c2x = cx * cx - sx * sx;
    const double s2y = 2.0 * sy * cy, c2y = cy * cy - sy * sy;
    const double tu = powi(t, pu), tp = powi(t, pp), tc = powi(t, pc);

    v.u1 = tu * sx * sx * sy * cy;
    v.u1_x = tu * 2.0 * kPi * sx * cx * sy * cy;
    v.u1_y = tu * kPi * sx * sx * c2y;
    v.u1_lap = tu * kPi * kPi * s2y * (2.0 * c2x - 1.0);

    v.u2 = -tu * sx * cx * sy * sy;
    v.u2_x = -tu * kPi * c2x * sy * sy;
    v.u2_y = -tu * 2.0 * kPi * sx * cx * sy * cy;
    v.u2_lap = tu * kPi * kPi * s2x * (1.0 - 2.0 * c2y);

    v.p = tp * s2x * s2y;
    v.p_x = tp * 2.0 * kPi * c2x * s2y;
    v.p_y = tp * 2.0 * kPi * s2x * c2y;

    const double X = x * (x - 1.0), Y = y * (y - 1.0);
    v.c = tc * X * Y;
    v.c_t = pc == 0 ? 0.0 : pc * powi(t, pc - 1) * X * Y;
    v.c_x = tc * (2.0 * x - 1.0) * Y;
    v.c_y = tc * X * (2.0 * y - 1.0);
    v.c_xx = tc * 2.0 * Y;
    v.c_yy = tc * 2.0 * X;
  };
  return e;
}

std::array<double, 4> exact_solution(const ProblemCase& pc, double x, double y, double t) {
  const ExactValues v = pc.exact.at(x, y, t);
  return {v.u1, v.u2, v.p, v.c};
}

Forcing mms_forcing(const ProblemCase& pc, double x, double y, double t, Subdomain sub) {
  Forcing f;
  if (!pc.use_mms_forcing) return f;
  if (sub == Subdomain::Unified && pc.has_interface) sub = pc.side_of(x, y);
  const CoefficientSet& co = pc.coeffs(sub);

  ExactValues v;
  pc.exact.eval(x, y, t, v);
  const double mu = viscosity(co, v.c);

  f.f1x = -mu * v.u1_lap + co.sigma * v.u1 + v.p_x;
  f.f1y = -mu * v.u2_lap + co.sigma * v.u2 + v.p_y;
  f.f2 = v.u1_x + v.u2_y;
  f.g = co.phi * v.c_t -
        (co.dD1_dx(x, y, t) * v.c_x + co.D1(x, y, t) * v.c_xx +
         co.dD2_dy(x, y, t) * v.c_y + co.D2(x, y, t) * v.c_yy) +
        v.u1 * v.c_x + v.u2 * v.c_y + co.alpha * v.c;
  return f;
}

double paper_mu_ref() { return kViscA * std::exp(kViscB * 0.0625); }

namespace {

CoefficientSet make_paper_coefficients(double sigma, double phi) {
  CoefficientSet c;
  c.sigma = sigma;
  c.alpha = 0.01;
  c.phi = phi;
  c.viscosity_a = kViscA;
  c.viscosity_b = kViscB;
  c.mu_l = paper_mu_ref();
  c.mu_u = paper_mu_ref();
  c.D1 = [](double x, double y, double t) {
    const double sx = std::sin(kPi * x), s2y = std::sin(2.0 * kPi * y);
    return t * t * sx * sx * sx * sx * s2y * s2y;
  };
  c.dD1_dx = [](double x, double y, double t) {
    const double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
    const double s2y = std::sin(2.0 * kPi * y);
    return 4.0 * kPi * t * t * sx * sx * sx * cx * s2y * s2y;
  };
  c.D2 = [](double x, double y, double t) {
    const double s2x = std::sin(2.0 * kPi * x), sy = std::sin(kPi * y);
    return t * t * s2x * s2x * sy * sy * sy * sy;
  };
  c.dD2_dy = [](double x, double y, double t) {
    const double s2x = std::sin(2.0 * kPi * x);
    const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
    return 4.0 * kPi * t * t * s2x * s2x * sy * sy * sy * cy;
  };
  return c;
}

}  // namespace

ProblemCase make_stokes_case() {
  ProblemCase pc;
  pc.label = CaseLabel::Stokes;
  pc.name = "stokes";
  pc.coeff_stokes = make_paper_coefficients(/*sigma=*/0.0, /*phi=*/1.0);
  pc.exact = make_trig_exact();
  return pc;
}

ProblemCase make_brinkman_case() {
  ProblemCase pc;
  pc.label = CaseLabel::Brinkman;
  pc.name = "brinkman";
  pc.coeff_stokes = make_paper_coefficients(/*sigma=*/1.0, /*phi=*/2.0);
  pc.exact = make_trig_exact();
  return pc;
}

ProblemCase make_interface_case(double split_coord) {
  ProblemCase pc;
  pc.label = CaseLabel::InterfaceStokesBrinkman;
  pc.name = "interface";
  pc.coeff_stokes = make_paper_coefficients(/*sigma=*/0.0, /*phi=*/1.0);
  pc.coeff_brinkman = make_paper_coefficients(/*sigma=*/1.0, /*phi=*/2.0);
  pc.has_interface = true;
  pc.split_axis = Axis::X;
  pc.split_coord = split_coord;
  pc.alpha_bjs = 1.0;
  pc.exact = make_trig_exact();
  return pc;
}

ProblemCase make_case_by_name(const std::string& name, double interface_split) {
  if (name == "stokes") return make_stokes_case();
  if (name == "brinkman") return make_brinkman_case();
  if (name == "interface") return make_interface_case(interface_split);
  throw std::invalid_argument("unknown problem case: " + name);
}

}  // namespace sbtrans
