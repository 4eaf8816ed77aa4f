#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wzis/empirical.hpp"
#include "wzis/model.hpp"
#include "wzis/rng.hpp"

namespace wzis {

// A block test channel P(u|a^ell) together with its marginal and the
// reconstruction table h(b^ell, u) -> xhat^ell (stored as block ids).
// The solver always produces deterministic test channels (one-hot rows);
// Markovity U -> X^ell -> Y^ell holds by construction since the assignment
// never reads b^ell.
struct WzCode {
  int usize = 1;
  std::vector<int> assignment;      // a -> u
  std::vector<double> marginal;     // q(u)
  std::vector<int> reconstruction;  // h[b * usize + u] -> xhat block id

  int h(std::int64_t b, int u) const {
    return reconstruction[static_cast<std::size_t>(b) * usize + static_cast<std::size_t>(u)];
  }
  // P(u|a) as a dense row-stochastic table (one-hot rows).
  std::vector<double> rows(std::int64_t na) const;
};

struct OperatingPoint {
  double rate = 0.0;        // H(U)/ell, bits per source letter
  double distortion = 0.0;  // (1/ell) E rho(X^ell, h(Y^ell,U))
  double lambda = 0.0;
  bool converged = true;
  WzCode code;
};

// Operating points with their lower convex hull over (rate, distortion).
class RdCurve {
 public:
  void add(OperatingPoint p) { points_.push_back(std::move(p)); }
  void finalize();

  const std::vector<OperatingPoint>& points() const { return points_; }
  const std::vector<int>& hull() const { return hull_; }
  bool on_hull(int index) const;

  // Convexified value at the given rate (linear interpolation between hull
  // vertices = time sharing; beyond the largest hull rate returns the
  // minimum hull distortion).
  double query(double rate) const;
  // Non-convexified diagnostic: best raw point with rate <= given rate.
  double pointwise_query(double rate) const;

 private:
  std::vector<OperatingPoint> points_;
  std::vector<int> hull_;
};

double entropy_bits(std::span<const double> pmf);

// Optimal reconstruction for a general test channel: for each (u, b) with
// positive probability the posterior over a is P(a) rows[a][u] cond[a][b],
// and each coordinate picks the symbol minimizing the posterior cost, ties
// toward the smallest index. Zero-probability cells map to the all-0 block.
std::vector<int> optimal_reconstruction(const JointBlockDistribution& joint,
                                        std::span<const double> rows, int usize,
                                        const DistortionMatrix& rho);

// Entropy-constrained descent on (1/ell) E rho + lambda H(U)/ell over
// deterministic assignments, induced marginals and optimal reconstructions.
// Restart 0 starts from the identity-like assignment a -> a mod usize,
// further restarts are seeded uniform assignments. Returns the best local
// minimum; objective ties resolve to the lexicographically least assignment.
OperatingPoint solve_lagrangian(const JointBlockDistribution& joint, const DistortionMatrix& rho,
                                double lambda, int usize, Seed seed, int restarts);

// One operating point per lambda (extremes 0 and 1e6 are always added),
// hull over all points. Errors: EmptyGrid.
RdCurve drf_curve(const JointBlockDistribution& joint, const DistortionMatrix& rho,
                  std::span<const double> lambda_grid, int usize, Seed seed, int restarts);

// Deterministic slope-bisection refinement: starts from the lambda extremes
// and inserts the chord slope between adjacent hull vertices until no new
// vertex appears or max_points lambdas were solved.
RdCurve drf_curve_adaptive(const JointBlockDistribution& joint, const DistortionMatrix& rho,
                           int usize, Seed seed, int restarts, int max_points = 64);

// Exact hull over ALL deterministic maps X^ell -> U (usize^{alpha^ell} of
// them). Hard caps alpha^ell <= 8 and usize <= alpha^ell + 1; errors:
// CapExceeded.
RdCurve brute_force_drf(const JointBlockDistribution& joint, const DistortionMatrix& rho,
                        int usize);

// (1/ell) E rho(X^ell, h(Y^ell, U)) of a deterministic-assignment code.
double code_distortion(const JointBlockDistribution& joint, const DistortionMatrix& rho,
                       const WzCode& code);

}  // namespace wzis
