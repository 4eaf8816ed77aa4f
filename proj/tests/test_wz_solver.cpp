#include <doctest.h>

#include <cmath>
#include <vector>

#include "wzis/empirical.hpp"
#include "wzis/error.hpp"
#include "wzis/wz_solver.hpp"

using namespace wzis;

namespace {

BlockDistribution make_source(std::vector<double> probs, int ell, int alpha) {
  BlockDistribution d;
  d.block_len = ell;
  d.alphabet = alpha;
  d.probs = std::move(probs);
  return d;
}

// Independent single-letter oracle: objective of a deterministic map with
// optimal reconstruction, computed from first principles.
double oracle_objective_ell1(const JointBlockDistribution& joint, const DistortionMatrix& rho,
                             const std::vector<int>& map, int usize, double lambda) {
  const std::int64_t na = joint.na, nb = joint.nb;
  std::vector<double> q(static_cast<std::size_t>(usize), 0.0);
  for (std::int64_t a = 0; a < na; ++a)
    q[static_cast<std::size_t>(map[static_cast<std::size_t>(a)])] += joint.source_prob(a);
  double dist = 0.0;
  for (int u = 0; u < usize; ++u) {
    for (std::int64_t b = 0; b < nb; ++b) {
      double best = 1e100;
      for (int xh = 0; xh < rho.recon_size(); ++xh) {
        double c = 0.0;
        for (std::int64_t a = 0; a < na; ++a)
          if (map[static_cast<std::size_t>(a)] == u)
            c += joint.source_prob(a) * joint.cond[static_cast<std::size_t>(a * nb + b)] *
                 rho.at(static_cast<int>(a), xh);
        best = std::min(best, c);
      }
      if (best < 1e99) dist += best;
    }
  }
  double ent = 0.0;
  for (double p : q)
    if (p > 0) ent -= p * std::log2(p);
  return dist + lambda * ent;
}

}  // namespace

TEST_CASE("optimal_reconstruction point-mass posterior") {
  // U = X (identity test channel): reconstruction is u itself, distortion 0
  auto src = make_source({0.3, 0.7}, 1, 2);
  const auto joint = join_with_channel(src, binary_symmetric_channel(0.2));
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  std::vector<double> rows = {1, 0, 0, 1};  // P(u|a) identity
  const auto h = optimal_reconstruction(joint, rows, 2, ham);
  for (std::int64_t b = 0; b < 2; ++b) {
    CHECK(h[static_cast<std::size_t>(b * 2 + 0)] == 0);
    CHECK(h[static_cast<std::size_t>(b * 2 + 1)] == 1);
  }
  WzCode code;
  code.usize = 2;
  code.assignment = {0, 1};
  code.reconstruction = h;
  CHECK(code_distortion(joint, ham, code) == doctest::Approx(0.0));
}

TEST_CASE("optimal_reconstruction with constant U") {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  auto src = make_source({0.5, 0.5}, 1, 2);
  // identity side channel: h(y) = y, distortion 0
  {
    const auto joint = join_with_channel(src, identity_channel(2));
    const auto h = optimal_reconstruction(joint, std::vector<double>{1, 1}, 1, ham);
    CHECK(h[0] == 0);
    CHECK(h[1] == 1);
  }
  // BSC(0.2): h(y) = y, distortion 0.2
  {
    const auto joint = join_with_channel(src, binary_symmetric_channel(0.2));
    const auto h = optimal_reconstruction(joint, std::vector<double>{1, 1}, 1, ham);
    CHECK(h[0] == 0);
    CHECK(h[1] == 1);
    WzCode code;
    code.usize = 1;
    code.assignment = {0, 0};
    code.reconstruction = h;
    CHECK(code_distortion(joint, ham, code) == doctest::Approx(0.2));
  }
}

TEST_CASE("solve_lagrangian endpoints") {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  auto src = make_source({0.25, 0.25, 0.25, 0.25}, 2, 2);
  const auto joint = join_with_channel(src, binary_symmetric_channel(0.1));

  // lambda = 0 with |U| = alpha^ell: identity assignment, distortion 0
  const auto p0 = solve_lagrangian(joint, ham, 0.0, 4, 1, 8);
  CHECK(p0.distortion == doctest::Approx(0.0));
  CHECK(p0.rate == doctest::Approx(1.0));  // H(X^2)/2 for the uniform source

  // lambda huge: a single surviving cell, rate exactly 0
  const auto p1 = solve_lagrangian(joint, ham, 1e6, 4, 1, 8);
  CHECK(p1.rate == 0.0);
  int active = 0;
  for (double q : p1.code.marginal) active += q > 0.0;
  CHECK(active == 1);
}

TEST_CASE("solve_lagrangian matches the brute-force oracle at ell=1") {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  auto src = make_source({0.5, 0.5}, 1, 2);
  const auto joint = join_with_channel(src, binary_symmetric_channel(0.2));

  // independent oracle over all 9 deterministic maps {0,1} -> {0,1,2}
  double best = 1e100;
  for (int m0 = 0; m0 < 3; ++m0)
    for (int m1 = 0; m1 < 3; ++m1)
      best = std::min(best, oracle_objective_ell1(joint, ham, {m0, m1}, 3, 0.5));

  const auto pt = solve_lagrangian(joint, ham, 0.5, 3, 99, 64);
  const double obj = pt.distortion + 0.5 * pt.rate;
  CHECK(obj == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("drf_curve query endpoints") {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  auto src = make_source({0.5, 0.5}, 1, 2);
  const auto joint = join_with_channel(src, binary_symmetric_channel(0.2));
  const std::vector<double> grid{0.01, 0.1, 1.0, 10.0};
  const auto curve = drf_curve(joint, ham, grid, 3, 5, 16);
  CHECK(curve.query(1.0) == doctest::Approx(0.0));       // lossless at R = log2(alpha)
  CHECK(curve.query(0.0) == doctest::Approx(0.2));       // Bayes denoising with |U| = 1
  CHECK(curve.query(2.0) == doctest::Approx(0.0));       // beyond the hull: min distortion
}

TEST_CASE("64-point log grid matches the brute-force hull vertex for vertex") {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  auto src = make_source({0.5, 0.5}, 1, 2);
  const auto joint = join_with_channel(src, binary_symmetric_channel(0.2));
  std::vector<double> grid;
  for (int i = 0; i < 64; ++i) grid.push_back(1e-4 * std::pow(10.0, 10.0 * i / 63.0));
  const auto solver = drf_curve(joint, ham, grid, 3, 7, 64);
  const auto oracle = brute_force_drf(joint, ham, 3);

  for (int hv : oracle.hull()) {
    const auto& v = oracle.points()[static_cast<std::size_t>(hv)];
    bool found = false;
    for (int sv : solver.hull()) {
      const auto& w = solver.points()[static_cast<std::size_t>(sv)];
      if (std::abs(w.rate - v.rate) <= 1e-6 && std::abs(w.distortion - v.distortion) <= 1e-6)
        found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("brute_force_drf degenerate cases") {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  // perfect side information: distortion 0 at rate 0
  {
    auto src = make_source({0.5, 0.5}, 1, 2);
    const auto joint = join_with_channel(src, identity_channel(2));
    const auto curve = brute_force_drf(joint, ham, 3);
    CHECK(curve.query(0.0) == doctest::Approx(0.0));
  }
  // useless side information, uniform source: (0, 0.5) and (1, 0)
  {
    auto src = make_source({0.5, 0.5}, 1, 2);
    const auto joint = join_with_channel(src, validate_dmc({{0.5, 0.5}, {0.5, 0.5}}));
    const auto curve = brute_force_drf(joint, ham, 3);
    CHECK(curve.query(0.0) == doctest::Approx(0.5));
    CHECK(curve.query(1.0) == doctest::Approx(0.0));
  }
  // point-mass source: nothing to code
  {
    auto src = make_source({1.0, 0.0}, 1, 2);
    const auto joint = join_with_channel(src, binary_symmetric_channel(0.3));
    const auto curve = brute_force_drf(joint, ham, 3);
    CHECK(curve.query(0.0) == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(brute_force_drf(join_with_channel(make_source({0.5, 0.5}, 1, 2),
                                                    binary_symmetric_channel(0.1)),
                                  ham, 5),
                  Error);  // |U| > alpha^ell + 1
}

TEST_CASE("hull is convex, nonincreasing, and below every point") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> p(4);
    double sum = 0;
    for (auto& v : p) sum += (v = rng.next_unit() + 0.05);
    for (auto& v : p) v /= sum;
    auto src = make_source(p, 2, 2);
    std::vector<std::vector<double>> chrows(2, std::vector<double>(2));
    const double eps = 0.05 + 0.4 * rng.next_unit();
    chrows[0] = {1 - eps, eps};
    chrows[1] = {eps, 1 - eps};
    const auto joint = join_with_channel(src, validate_dmc(chrows));
    const DistortionMatrix ham = DistortionMatrix::hamming(2);
    const auto curve = drf_curve_adaptive(joint, ham, 5, 1000 + trial, 16, 24);

    double prev = 1e100;
    for (double r = 0.0; r <= 1.2; r += 0.05) {
      const double q = curve.query(r);
      CHECK(q <= prev + 1e-12);
      prev = q;
    }
    // convexity along hull vertices
    const auto& pts = curve.points();
    const auto& hull = curve.hull();
    for (std::size_t i = 2; i < hull.size(); ++i) {
      const auto& a = pts[static_cast<std::size_t>(hull[i - 2])];
      const auto& b = pts[static_cast<std::size_t>(hull[i - 1])];
      const auto& c = pts[static_cast<std::size_t>(hull[i])];
      const double s1 = (b.distortion - a.distortion) / (b.rate - a.rate);
      const double s2 = (c.distortion - b.distortion) / (c.rate - b.rate);
      CHECK(s1 <= s2 + 1e-9);
    }
    for (const auto& pt : pts) CHECK(pt.distortion >= curve.query(pt.rate) - 1e-9);
  }
}

TEST_CASE("solver matches oracle hulls on random instances (alpha^ell <= 4)") {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const int ell = trial % 2 == 0 ? 1 : 2;
    const std::int64_t na = ell == 1 ? 2 : 4;
    std::vector<double> p(static_cast<std::size_t>(na));
    double sum = 0;
    for (auto& v : p) sum += (v = rng.next_unit() + 0.02);
    for (auto& v : p) v /= sum;
    auto src = make_source(p, ell, 2);
    const double eps = 0.05 + 0.35 * rng.next_unit();
    const auto joint = join_with_channel(src, binary_symmetric_channel(eps));
    const int usize = static_cast<int>(na) + 1;

    const auto oracle = brute_force_drf(joint, ham, usize);
    const auto solver = drf_curve_adaptive(joint, ham, usize, 555 + trial, 64, 64);
    for (int hv : oracle.hull()) {
      const auto& v = oracle.points()[static_cast<std::size_t>(hv)];
      CHECK(solver.query(v.rate) <= v.distortion + 1e-6);
      CHECK(solver.query(v.rate) >= oracle.query(v.rate) - 1e-9);
    }
  }
}

TEST_CASE("enlarging |U| beyond alpha^ell does not improve desk-scale hulls") {
  const DistortionMatrix ham = DistortionMatrix::hamming(2);
  auto src = make_source({0.2, 0.3, 0.4, 0.1}, 2, 2);
  const auto joint = join_with_channel(src, binary_symmetric_channel(0.15));
  const auto small = drf_curve_adaptive(joint, ham, 4, 3, 32, 32);
  const auto big = drf_curve_adaptive(joint, ham, 5, 3, 32, 32);
  for (double r = 0.0; r <= 1.0; r += 0.1) {
    CHECK(big.query(r) <= small.query(r) + 1e-9);
    CHECK(big.query(r) >= small.query(r) - 1e-9);
  }
}
