#include "avlab/bench/validate.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "avlab/book3d/book_geometry.hpp"
#include "avlab/book3d/elliptic.hpp"
#include "avlab/book3d/weights.hpp"
#include "avlab/coeffs/asymptotics.hpp"
#include "avlab/coeffs/transmission.hpp"
#include "avlab/flows/noise.hpp"

namespace avlab {

namespace {

std::string sci(double x) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << x;
  return s.str();
}

CheckResult bound(const std::string& name, double value, double limit) {
  return {name, value <= limit, sci(value) + " <= " + sci(limit)};
}

ExperimentConfig planar(const std::string& h, double box, double truncation, int nodes) {
  ExperimentConfig c;
  c.model.hamiltonian = h;
  c.model.box = box;
  c.truncation = truncation;
  c.nodes = nodes;
  return c;
}

void radial_checks(std::vector<CheckResult>& out, unsigned threads) {
  const auto s = build_planar(planar("radial-quadratic", 10, 12, 64), threads);
  const auto& t = s->model->table(0);
  double eT = 0, ea = 0, eb = 0;
  for (std::size_t k = 0; k < t.h.size(); ++k) {
    eT = std::max(eT, std::abs(t.T[k] / (2 * M_PI) - 1));
    if (t.h[k] >= 0.1 && t.h[k] <= 10) ea = std::max(ea, std::abs(t.a[k] / (4 * M_PI * t.h[k]) - 1));
    eb = std::max(eb, std::abs(t.b[k] - 1));
  }
  out.push_back(bound("radial period 2π (relative)", eT, 1e-6));
  out.push_back(bound("radial a(h) = 4πh on [0.1, 10] (relative)", ea, 1e-4));
  out.push_back(bound("radial drift b = 1 (absolute)", eb, 1e-3));
}

void duffing_checks(std::vector<CheckResult>& out, unsigned threads) {
  const auto s = build_planar(planar("duffing-well", 6, 15, 64), threads);
  const auto& g = s->graph;
  for (const auto& e : g.edges) {
    const auto& t = s->model->table(e.id);
    const std::string edge = "duffing edge " + std::to_string(e.id);
    bool monotone = true;
    for (std::size_t k = 1; k < t.T.size(); ++k)
      if (!(t.T[k] != t.T[k - 1]) || (k > 1 && (t.T[k] - t.T[k - 1]) * (t.T[k - 1] - t.T[k - 2]) <= 0)) monotone = false;
    out.push_back({edge + " period strictly monotone (mixing)", monotone, ""});
    if (!e.bounded()) continue;
    const auto top = asymptotic_fit(t, g, EndSide::Upper);
    out.push_back({edge + " T ~ |log|h - 1/4|| at the saddle",
                   top.regime == EndRegime::Saddle && top.t_coef > 0 && top.r2 >= 0.99 && top.decades >= 3.0,
                   "slope " + sci(top.t_coef) + ", R² " + std::to_string(top.r2) + ", decades " + std::to_string(top.decades)});
    const auto bottom = asymptotic_fit(t, g, EndSide::Lower);
    out.push_back({edge + " a ∝ |h| at the well", bottom.regime == EndRegime::Extremum && bottom.r2 >= 0.999,
                   "R² " + std::to_string(bottom.r2)});
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const auto& vt = s->model->transmission(static_cast<int>(v));
    if (vt.ends.size() < 2) {
      out.push_back(bound("duffing vertex " + std::to_string(v) + " entrance weight", vt.weights.at(0), 1e-6));
      continue;
    }
    double lower = 0, upper = 0;
    for (std::size_t k = 0; k < vt.ends.size(); ++k) (vt.ends[k].side == EndSide::Lower ? lower : upper) += vt.weights[k];
    out.push_back(bound("duffing vertex " + std::to_string(v) + " flux balance (relative)", std::abs(lower / upper - 1), 1e-3));
  }
}

void book_checks(std::vector<CheckResult>& out) {
  std::vector<BookPoint> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(BookPoint{1, 0.5 + 0.25 * i, 0.05 + 0.07 * i});
  double eT = 0, enu = 0, ea = 0;
  for (const auto& p : grid) {
    const double T = elliptic_period(p);
    eT = std::max(eT, std::abs(traced_period(p) / T - 1));
    const double y1 = p.y()[0];
    const double target = 2 * y1 * y1 * book_coefficients(std::tan(p.theta)).alpha;
    enu = std::max(enu, std::abs(nu_average(p, [](const Vec3& x) { return x[2] * x[2]; }) / target - 1));
    const Eigen::SelfAdjointEigenSolver<Mat2> es(book_a_matrix(p));
    ea = std::max({ea, std::abs(es.eigenvalues()[0] - lambda_of(std::tan(p.theta))), std::abs(es.eigenvalues()[1] - 1)});
  }
  out.push_back(bound("book traced period vs 2√2K(t)/y₁ (relative)", eT, 1e-6));
  out.push_back(bound("book ν_y(x₃²) = 2y₁²α(t) (relative)", enu, 1e-6));
  out.push_back(bound("book a-matrix eigenvalues {λ(t), 1}", ea, 1e-10));

  const auto ac = angle_coefficients(M_PI / 4 - 1e-9);
  out.push_back(bound("λ_θh_θ → 4 at the binding", std::abs(ac.lambda * ac.h - 4), 1e-3));
  const double t = 1e-2;
  const double tail = (complete_elliptic(t).K - M_PI / 2 * (1 + t * t / 4)) / std::pow(t, 4);
  out.push_back(bound("K(t) = π/2(1 + t²/4 + O(t⁴))", std::abs(tail / (9 * M_PI / 128) - 1), 1e-2));

  const auto w = weight_validations();
  out.push_back(bound("angular weight slope at φ = π/2 (relative)",
                      std::abs(w.right_end.slope / w.right_expected - 1), 1e-4));
  out.push_back(bound("angular weight slope at φ = 0 (relative)", std::abs(w.left_end.slope / w.left_expected - 1), 2e-2));
  out.push_back({"A₂ constant finite", std::isfinite(w.a2.sup) && w.a2.sup >= w.a2.at_origin, "sup " + sci(w.a2.sup)});
  out.push_back(bound("A₂ constant under grid refinement (relative)", std::abs(w.a2_refined.sup / w.a2.sup - 1), 0.05));
}

void noise_checks(std::vector<CheckResult>& out) {
  const double nu = 0.5;
  for (bool compressible : {false, true}) {
    FourierPreset p;
    p.compressible = compressible;
    p.amplitude = NoiseModel::max_amplitude(nu, p.delta);
    const auto noise = NoiseModel::fourier(p);
    CheckResult c{std::string("pure-diffusion margin, ") + (compressible ? "curl-free" : "divergence-free") + " preset",
                  true, ""};
    try {
      c.detail = "max rate/2ν " + sci(noise.check_pure_diffusion(nu, Box{{-6, -6}, {6, 6}})) + " <= " + sci(1 - p.delta);
    } catch (const Error& e) {
      c.passed = false;
      c.detail = e.what();
    }
    out.push_back(c);
  }
}

}  // namespace

std::vector<CheckResult> run_validations(unsigned threads) {
  std::vector<CheckResult> out;
  auto guarded = [&](const std::string& group, auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      out.push_back({group, false, e.what()});
    }
  };
  guarded("radial coefficients", [&] { radial_checks(out, threads); });
  guarded("duffing coefficients", [&] { duffing_checks(out, threads); });
  guarded("book formulas", [&] { book_checks(out); });
  guarded("noise presets", [&] { noise_checks(out); });
  return out;
}

}  // namespace avlab
