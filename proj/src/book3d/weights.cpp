#include "avlab/book3d/weights.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>

#include "avlab/book3d/elliptic.hpp"
#include "avlab/common/error.hpp"

namespace avlab {

namespace {

/// 1/((1+u²)√λ(u)) with 1 − u given separately.
double phi_integrand(double u, double gap) {
  const double tc = std::sqrt(gap * (1.0 + u));
  return 1.0 / ((1.0 + u * u) * std::sqrt(book_coefficients(u, tc).lambda));
}

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 4, 1e-13);
}

}  // namespace

AngularWeight::AngularWeight(int nodes_per_decade) {
  if (nodes_per_decade < 1) throw Error(ErrorKind::InvalidArgument, "nodes per decade");
  // Nodes from the binding side (gap = 1e-300) down to t = 0: log-spaced in the
  // gap, then log-spaced in t, then t = 0.
  std::vector<std::pair<double, double>> tg;  // (t, gap)
  const int gap_nodes = 300 * nodes_per_decade;
  for (int j = 0; j <= gap_nodes; ++j) {
    const double gap = std::pow(10.0, -300.0 + (300.0 + std::log10(0.5)) * j / gap_nodes);
    tg.emplace_back(1.0 - gap, gap);
  }
  const int t_nodes = 10 * nodes_per_decade;
  for (int j = t_nodes - 1; j >= 0; --j) {
    const double t = std::pow(10.0, -10.0 + (10.0 + std::log10(0.5)) * j / t_nodes);
    tg.emplace_back(t, 1.0 - t);
  }
  tg.emplace_back(0.0, 1.0);

  // Cumulative ∫_t^1 from the binding side; gap panels in s = log(gap).
  std::vector<double> G(tg.size());
  {
    const double g0 = tg[0].second;
    G[0] = g0 * phi_integrand(tg[0].first, g0);
  }
  for (std::size_t j = 1; j < tg.size(); ++j) {
    const auto [t0, g0] = tg[j - 1];
    const auto [t1, g1] = tg[j];
    double piece;
    if (j <= static_cast<std::size_t>(gap_nodes)) {
      piece = gk(
          [](double s) {
            const double gap = std::exp(s);
            return phi_integrand(1.0 - gap, gap) * gap;
          },
          std::log(g0), std::log(g1));
    } else {
      piece = gk([](double u) { return phi_integrand(u, 1.0 - u); }, t1, t0);
    }
    G[j] = G[j - 1] + piece;
  }
  integral_ = G.back();
  c_ = M_PI / (2.0 * integral_);

  std::vector<double> logphi, kv;
  for (std::size_t j = 0; j < tg.size(); ++j) {
    const auto [t, gap] = tg[j];
    const auto bc = book_coefficients(t, std::sqrt(gap * (1.0 + t)));
    Node node{t, gap, c_ * G[j], 4.0 * M_SQRT2 * t * bc.K * std::sqrt(bc.lambda) / (c_ * std::sqrt(1.0 + t * t))};
    nodes_.push_back(node);
    logphi.push_back(std::log(node.phi));
    kv.push_back(node.k);
  }
  nodes_.back().phi = M_PI / 2;
  logphi.back() = std::log(M_PI / 2);
  log_phi_min_ = logphi.front();
  k_min_phi_ = kv.front();
  k_of_logphi_ = MonotoneCubic(logphi, kv);
}

double AngularWeight::k(double phi) const {
  if (!(phi > 0.0)) return std::numeric_limits<double>::infinity();
  if (phi >= M_PI / 2) return 0.0;
  const double lp = std::log(phi);
  if (lp < log_phi_min_) return k_min_phi_ * std::sqrt(lp / log_phi_min_);
  return k_of_logphi_(lp);
}

SlopeFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  SlopeFit f;
  f.points = x.size();
  if (x.size() < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / x.size();
    my += y[i] / x.size();
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

double a2_functional(const AngularWeight& w, int n, const Vec2& z, double rho, double tol) {
  if (!(rho > 0.0) || n < 1) throw Error(ErrorKind::InvalidArgument, "A2 ball");
  const double cut = M_PI / 2 - 1.0 / n;
  const double k_cut = w.k(cut);
  const auto kn = [&](double psi) {
    psi = std::remainder(psi, 2 * M_PI);
    const double a = std::abs(psi);
    return a <= cut ? w.k(a) : k_cut;
  };

  const double d = z.norm();
  const double center = d > 0 ? std::atan2(z[1], z[0]) : 0.0;
  double lo, hi;
  if (d == 0.0 || rho >= d) {
    lo = center - M_PI;
    hi = center + M_PI;
  } else {
    const double half = std::asin(rho / d);
    lo = center - half;
    hi = center + half;
  }
  // Radial extent of the ray at angle ψ inside the ball.
  const auto chord = [&](double psi, double& r_lo, double& r_hi) {
    if (d == 0.0) {
      r_lo = 0.0;
      r_hi = rho;
      return;
    }
    const double s = d * std::sin(psi - center), c = d * std::cos(psi - center);
    const double root = std::sqrt(std::max(0.0, rho * rho - s * s));
    r_hi = c + root;
    r_lo = rho >= d ? 0.0 : std::max(0.0, c - root);
  };

  // Break the angular range where k_n is singular or kinked.
  std::vector<double> cuts{lo, hi};
  for (int m = -2; m <= 2; ++m)
    for (double b : {0.0, cut, -cut, M_PI})
      if (const double x = b + 2 * M_PI * m; x > lo && x < hi) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());

  // Each piece is mapped onto [−1, 1] so the quadrature never lands on a cut.
  boost::math::quadrature::tanh_sinh<double> ts;
  double int_w = 0.0, int_inv = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a <= 1e-12 * (hi - lo)) continue;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    int_w += half * ts.integrate(
                        [&](double u) {
                          const double psi = mid + half * u;
                          double r0, r1;
                          chord(psi, r0, r1);
                          const double k = kn(psi);
                          return std::isfinite(k) ? k * (r1 * r1 * r1 - r0 * r0 * r0) / 3.0 : 0.0;
                        },
                        -1.0, 1.0, tol);
    int_inv += half * ts.integrate(
                          [&](double u) {
                            const double psi = mid + half * u;
                            double r0, r1;
                            chord(psi, r0, r1);
                            return (r1 - r0) / kn(psi);
                          },
                          -1.0, 1.0, tol);
  }
  return int_w * int_inv / (M_PI * M_PI * std::pow(rho, 4));
}

A2Estimate a2_supremum(const AngularWeight& w, int n, const A2Grid& grid) {
  A2Estimate e;
  e.at_origin = a2_functional(w, n, Vec2::Zero(), 1.0, grid.tol);
  e.sup = e.at_origin;
  const auto value = [&](double ang, double log_rho) {
    return a2_functional(w, n, Vec2(std::cos(ang), std::sin(ang)), std::exp(log_rho), grid.tol);
  };
  const double lr_lo = std::log(grid.rho_min), lr_hi = std::log(grid.rho_max);
  const double d_ang = M_PI / std::max(1, grid.angles - 1);
  const double d_lr = (lr_hi - lr_lo) / std::max(1, grid.radii - 1);
  double best_ang = 0, best_lr = lr_lo, best = -1;
  for (int i = 0; i < grid.angles; ++i)
    for (int j = 0; j < grid.radii; ++j) {
      const double ang = i * d_ang, lr = lr_lo + j * d_lr;
      const double v = value(ang, lr);
      if (v > best) {
        best = v;
        best_ang = ang;
        best_lr = lr;
      }
    }
  // Compass search from the best node, kept inside the grid's box.
  double sa = 0.5 * d_ang, sr = 0.5 * d_lr;
  while (sa > 1e-4 * d_ang) {
    bool moved = false;
    for (const auto [da, dr] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      const double ang = std::clamp(best_ang + da * sa, 0.0, M_PI);
      const double lr = std::clamp(best_lr + dr * sr, lr_lo, lr_hi);
      const double v = value(ang, lr);
      if (v > best) {
        best = v;
        best_ang = ang;
        best_lr = lr;
        moved = true;
      }
    }
    if (!moved) {
      sa *= 0.5;
      sr *= 0.5;
    }
  }
  if (best > e.sup) {
    e.sup = best;
    e.argmax_angle = best_ang;
    e.argmax_rho = std::exp(best_lr);
  }
  return e;
}

WeightReport weight_validations(int a2_truncation, const A2Grid& grid) {
  const AngularWeight w;
  WeightReport r;
  r.c = w.c();
  // Slopes implied by k's definition: t ∼ (√3/2c)(π/2 − φ) with λ → 3/4 on
  // one side, K√λ ∼ √(|log φ|/2) on the other.
  r.right_expected = 3 * M_SQRT2 * M_PI / (2 * r.c * r.c);
  r.left_expected = 2 * M_SQRT2 / r.c;
  std::vector<double> xr, yr, xl, yl;
  for (const auto& node : w.nodes()) {
    if (node.t > 1e-7 && node.t < 1e-4) {
      xr.push_back(M_PI / 2 - node.phi);
      yr.push_back(node.k);
    }
    if (node.phi > 0 && node.phi < 1e-150) {
      xl.push_back(std::sqrt(std::abs(std::log(node.phi))));
      yl.push_back(node.k);
    }
  }
  r.right_end = linear_fit(xr, yr);
  r.left_end = linear_fit(xl, yl);
  const auto ac = angle_coefficients(M_PI / 4 - 1e-12);
  r.lambda_h_near_binding = ac.lambda * ac.h;
  r.a2_truncation = a2_truncation;
  r.a2 = a2_supremum(w, a2_truncation, grid);
  A2Grid fine = grid;
  fine.angles *= 2;
  fine.radii *= 2;
  fine.tol *= 0.1;
  r.a2_refined = a2_supremum(w, a2_truncation, fine);
  return r;
}

}  // namespace avlab
