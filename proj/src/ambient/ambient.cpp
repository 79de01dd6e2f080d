#include "avlab/ambient/ambient.hpp"

namespace avlab {

AmbientDynamics<2> planar_dynamics(const HamiltonianSystem2D& sys) {
  AmbientDynamics<2> d;
  d.shear = [&sys](const Vec2& x) { return sys.shear(x); };
  d.drift = [&sys](const Vec2& x) { return sys.drift(x); };
  d.invariants = [&sys](const Vec2& x) { return Vec2(sys.H(x), 0.0); };
  d.domain = [&sys](const Vec2& x) { return sys.box().contains(x); };
  d.level = [&sys](const Vec2& x) { return sys.H(x); };
  d.nu = sys.nu();
  return d;
}

AmbientInitLaw<2> annulus_law(const Vec2& center, double r_in, double r_out) {
  if (!(r_out > r_in && r_in >= 0)) throw Error(ErrorKind::InvalidArgument, "annulus radii");
  return [=](RandomStream& rng) {
    const double u = rng.uniform(), phi = 2 * M_PI * rng.uniform();
    const double r = std::sqrt(r_in * r_in + u * (r_out * r_out - r_in * r_in));
    return Vec2(center + r * Vec2(std::cos(phi), std::sin(phi)));
  };
}

Vec2 ambient_step(const HamiltonianSystem2D& sys, const AmbientConfig& cfg, const Vec2& x, double dt,
                  RandomStream& rng) {
  if (!sys.box().contains(x)) throw Error(ErrorKind::OutOfDomain, "start point outside the domain");
  return AmbientSimulator<2>(planar_dynamics(sys), cfg).step(x, dt, rng);
}

Ensemble simulate_projected(const HamiltonianSystem2D& sys, const Projection& proj, const AmbientConfig& cfg,
                            const AmbientInitLaw<2>& init, const std::vector<double>& times, std::size_t n_paths,
                            std::uint64_t seed, unsigned threads) {
  const AmbientSimulator<2> sim(planar_dynamics(sys), cfg);
  return sim.simulate(init, times, n_paths, seed, threads, PathKind::AmbientProjected,
                      [&](const Vec2& x, std::int32_t& label, double& c1, double& c2) {
                        encode_location(proj.classify(x), label, c1);
                        c2 = 0.0;
                      });
}

}  // namespace avlab
