#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wzis/empirical.hpp"
#include "wzis/model.hpp"
#include "wzis/rng.hpp"
#include "wzis/wz_solver.hpp"

namespace wzis {

// Three-output channel P(y,z|x) for the two-stage setting. Rows (over (y,z)
// pairs) must be stochastic; no Markov structure between the two side
// sequences is assumed.
class TwoSidedChannel {
 public:
  TwoSidedChannel() = default;

  int input_size() const { return alpha_; }
  int y_size() const { return ny_; }
  int z_size() const { return nz_; }
  double prob(int x, int y, int z) const {
    return table_[(static_cast<std::size_t>(x) * ny_ + y) * nz_ + z];
  }
  Channel marginal_y() const;
  Channel marginal_z() const;

  // Rows indexed [x][(y,z)] with z fastest.
  friend TwoSidedChannel validate_two_sided(const std::vector<std::vector<double>>& matrix,
                                            int ny, int nz);

 private:
  std::vector<double> table_;
  int alpha_ = 0, ny_ = 0, nz_ = 0;
};

TwoSidedChannel validate_two_sided(const std::vector<std::vector<double>>& matrix, int ny, int nz);

struct SrCaps {
  int max_u = 0;  // 0 means alpha^ell + 3
  int max_v = 0;  // 0 means alpha^ell * |U| + 1
};

struct SrPoint {
  double d1 = 0.0;  // first-stage distortion under rho1
  double d2 = 0.0;  // second-stage distortion under rho2
  double hu = 0.0;        // H(U)
  double hv_given_u = 0.0;  // H(V|U)
  std::vector<int> u_map;   // X^ell -> U
  std::vector<int> v_map;   // X^ell -> V
  bool converged = true;
};

// Exhaustive two-stage region at tiny scale: enumerates deterministic U and
// V maps (canonical cell labelings), keeps pairs meeting H(U) <= ell*R and
// H(V|U) <= ell*dR, reconstructs h from (Y^ell, U) under rho1 and h' from
// (Z^ell, U, V) under rho2, and returns the Pareto frontier of (D1, D2),
// sorted by D1. Cap: alpha^ell <= 4. Errors: CapExceeded.
std::vector<SrPoint> brute_force_sr_region(const BlockDistribution& source,
                                           const TwoSidedChannel& ch,
                                           const DistortionMatrix& rho1,
                                           const DistortionMatrix& rho2, double rate,
                                           double delta_rate, SrCaps caps = {});

// Entropy-constrained descent on V with the first-stage code fixed:
// assignment minimizes E rho2(X, h'(Z,U,V)) + lambda2 H(V|U)/ell, with
// conditional marginal updates and optimal reconstructions, seeded restarts
// as in the single-stage solver.
SrPoint conditional_second_stage(const BlockDistribution& source, const TwoSidedChannel& ch,
                                 const DistortionMatrix& rho1, const DistortionMatrix& rho2,
                                 const WzCode& first, double lambda2, SrCaps caps, Seed seed,
                                 int restarts);

}  // namespace wzis
