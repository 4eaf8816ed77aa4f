#include "wzis/sr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "wzis/error.hpp"

namespace wzis {

TwoSidedChannel validate_two_sided(const std::vector<std::vector<double>>& matrix, int ny,
                                   int nz) {
  require(ny >= 1 && nz >= 1, ErrorCode::kConfigError, "side alphabets must be >= 1");
  require(!matrix.empty(), ErrorCode::kConfigError, "channel table must be nonempty");
  TwoSidedChannel ch;
  ch.alpha_ = static_cast<int>(matrix.size());
  ch.ny_ = ny;
  ch.nz_ = nz;
  for (std::size_t x = 0; x < matrix.size(); ++x) {
    require(matrix[x].size() == static_cast<std::size_t>(ny) * nz, ErrorCode::kConfigError,
            "row length must be ny*nz");
    double sum = 0.0;
    for (double v : matrix[x]) {
      require(v >= 0.0 && std::isfinite(v), ErrorCode::kNegativeEntry,
              "channel entries must be nonnegative");
      sum += v;
    }
    require(std::fabs(sum - 1.0) <= kStochasticTol, ErrorCode::kNonStochasticRow,
            "channel row " + std::to_string(x) + " is not stochastic");
    ch.table_.insert(ch.table_.end(), matrix[x].begin(), matrix[x].end());
  }
  return ch;
}

Channel TwoSidedChannel::marginal_y() const {
  std::vector<std::vector<double>> m(static_cast<std::size_t>(alpha_),
                                     std::vector<double>(static_cast<std::size_t>(ny_), 0.0));
  for (int x = 0; x < alpha_; ++x)
    for (int y = 0; y < ny_; ++y)
      for (int z = 0; z < nz_; ++z) m[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] += prob(x, y, z);
  // renormalize away accumulated rounding before validation
  for (auto& row : m) {
    double s = 0.0;
    for (double v : row) s += v;
    for (double& v : row) v /= s;
  }
  return validate_dmc(m);
}

Channel TwoSidedChannel::marginal_z() const {
  std::vector<std::vector<double>> m(static_cast<std::size_t>(alpha_),
                                     std::vector<double>(static_cast<std::size_t>(nz_), 0.0));
  for (int x = 0; x < alpha_; ++x)
    for (int z = 0; z < nz_; ++z)
      for (int y = 0; y < ny_; ++y) m[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)] += prob(x, y, z);
  for (auto& row : m) {
    double s = 0.0;
    for (double v : row) s += v;
    for (double& v : row) v /= s;
  }
  return validate_dmc(m);
}

namespace {

// Canonical maps {0..n-1} -> cells with at most max_cells cells, labeled in
// first-occurrence order.
std::vector<std::vector<int>> canonical_maps(std::int64_t n, int max_cells) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  std::function<void(std::int64_t, int)> rec = [&](std::int64_t pos, int used) {
    if (pos == n) {
      out.push_back(cur);
      return;
    }
    const int limit = std::min(used + 1, max_cells);
    for (int v = 0; v < limit; ++v) {
      cur[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, std::max(used, v + 1));
    }
  };
  rec(0, 0);
  return out;
}

int cell_count(const std::vector<int>& map) {
  int m = 0;
  for (int v : map) m = std::max(m, v + 1);
  return m;
}

double map_entropy(const std::vector<int>& map, std::span<const double> probs, int cells) {
  std::vector<double> q(static_cast<std::size_t>(cells), 0.0);
  for (std::size_t a = 0; a < map.size(); ++a) q[static_cast<std::size_t>(map[a])] += probs[a];
  return entropy_bits(q);
}

WzCode make_code(const JointBlockDistribution& joint, const DistortionMatrix& rho,
                 const std::vector<int>& assignment, int usize) {
  WzCode code;
  code.usize = usize;
  code.assignment = assignment;
  code.marginal.assign(static_cast<std::size_t>(usize), 0.0);
  for (std::size_t a = 0; a < assignment.size(); ++a)
    code.marginal[static_cast<std::size_t>(assignment[a])] += joint.source.probs[a];
  code.reconstruction = optimal_reconstruction(joint, code.rows(joint.na), usize, rho);
  return code;
}

}  // namespace

std::vector<SrPoint> brute_force_sr_region(const BlockDistribution& source,
                                           const TwoSidedChannel& ch,
                                           const DistortionMatrix& rho1,
                                           const DistortionMatrix& rho2, double rate,
                                           double delta_rate, SrCaps caps) {
  const std::int64_t na = source.table_size();
  require(na <= 4, ErrorCode::kCapExceeded, "two-stage brute force requires alpha^ell <= 4");
  const int ell = source.block_len;
  const int cap_u = caps.max_u > 0 ? caps.max_u : static_cast<int>(na) + 3;
  const int cap_v = caps.max_v > 0 ? caps.max_v : static_cast<int>(na) * (static_cast<int>(na) + 3) + 1;
  constexpr double kSlack = 1e-9;

  const JointBlockDistribution joint_y = join_with_channel(source, ch.marginal_y());
  const JointBlockDistribution joint_z = join_with_channel(source, ch.marginal_z());

  // Deterministic maps use at most na distinct cells.
  const auto u_maps = canonical_maps(na, std::min<int>(cap_u, static_cast<int>(na)));
  const auto v_maps = canonical_maps(na, std::min<int>(cap_v, static_cast<int>(na)));

  struct Entry {
    SrPoint point;
  };
  std::vector<SrPoint> feasible;
  for (const auto& u_map : u_maps) {
    const double hu = map_entropy(u_map, source.probs, cell_count(u_map));
    if (hu > static_cast<double>(ell) * rate + kSlack) continue;
    const int nu = cell_count(u_map);
    const WzCode first = make_code(joint_y, rho1, u_map, nu);
    const double d1 = code_distortion(joint_y, rho1, first);
    for (const auto& v_map : v_maps) {
      const int nv = cell_count(v_map);
      // H(V|U) = H(U,V) - H(U)
      std::vector<int> w_map(u_map.size());
      for (std::size_t a = 0; a < u_map.size(); ++a)
        w_map[a] = u_map[a] * nv + v_map[a];
      const double huv = map_entropy(w_map, source.probs, nu * nv);
      const double hvu = std::max(0.0, huv - hu);
      if (hvu > static_cast<double>(ell) * delta_rate + kSlack) continue;
      const WzCode second = make_code(joint_z, rho2, w_map, nu * nv);
      SrPoint p;
      p.d1 = d1;
      p.d2 = code_distortion(joint_z, rho2, second);
      p.hu = hu;
      p.hv_given_u = hvu;
      p.u_map = u_map;
      p.v_map = v_map;
      feasible.push_back(std::move(p));
    }
  }
  // Pareto frontier of (D1, D2) minima.
  std::sort(feasible.begin(), feasible.end(), [](const SrPoint& a, const SrPoint& b) {
    if (a.d1 != b.d1) return a.d1 < b.d1;
    return a.d2 < b.d2;
  });
  std::vector<SrPoint> frontier;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (auto& p : feasible) {
    if (!frontier.empty() && p.d1 == frontier.back().d1) continue;  // same D1, larger D2
    if (p.d2 < best_d2) {
      best_d2 = p.d2;
      frontier.push_back(std::move(p));
    }
  }
  return frontier;
}

SrPoint conditional_second_stage(const BlockDistribution& source, const TwoSidedChannel& ch,
                                 const DistortionMatrix& rho1, const DistortionMatrix& rho2,
                                 const WzCode& first, double lambda2, SrCaps caps, Seed seed,
                                 int restarts) {
  const std::int64_t na = source.table_size();
  require(static_cast<std::int64_t>(first.assignment.size()) == na, ErrorCode::kConfigError,
          "first-stage assignment has wrong size");
  require(lambda2 >= 0.0, ErrorCode::kConfigError, "lambda2 must be >= 0");
  const int ell = source.block_len;
  const int nu = first.usize;
  const int nv = caps.max_v > 0 ? caps.max_v : static_cast<int>(na) * (static_cast<int>(na) + 3) + 1;

  const JointBlockDistribution joint_y = join_with_channel(source, ch.marginal_y());
  const JointBlockDistribution joint_z = join_with_channel(source, ch.marginal_z());
  const double d1 = code_distortion(joint_y, rho1, first);
  const double hu = entropy_bits(first.marginal);

  // Conditional descent on V given the fixed U cells.
  struct Result {
    std::vector<int> v_map;
    double objective = 0.0, d2 = 0.0, hvu = 0.0;
    bool converged = false;
  };
  const auto& u_map = first.assignment;
  std::vector<double> ucell_mass(static_cast<std::size_t>(nu), 0.0);
  for (std::int64_t a = 0; a < na; ++a)
    ucell_mass[static_cast<std::size_t>(u_map[static_cast<std::size_t>(a)])] +=
        source.probs[static_cast<std::size_t>(a)];

  auto eval = [&](const std::vector<int>& v_map, const std::vector<int>& h2, double& d2,
                  double& hvu) {
    std::vector<int> w_map(static_cast<std::size_t>(na));
    for (std::int64_t a = 0; a < na; ++a)
      w_map[static_cast<std::size_t>(a)] =
          u_map[static_cast<std::size_t>(a)] * nv + v_map[static_cast<std::size_t>(a)];
    WzCode w;
    w.usize = nu * nv;
    w.assignment = w_map;
    w.reconstruction = h2;
    d2 = code_distortion(joint_z, rho2, w);
    std::vector<double> quv(static_cast<std::size_t>(nu) * nv, 0.0);
    for (std::int64_t a = 0; a < na; ++a)
      quv[static_cast<std::size_t>(w_map[static_cast<std::size_t>(a)])] +=
          source.probs[static_cast<std::size_t>(a)];
    hvu = std::max(0.0, entropy_bits(quv) - hu);
  };

  auto recon_w = [&](const std::vector<int>& v_map) {
    std::vector<int> w_map(static_cast<std::size_t>(na));
    for (std::int64_t a = 0; a < na; ++a)
      w_map[static_cast<std::size_t>(a)] =
          u_map[static_cast<std::size_t>(a)] * nv + v_map[static_cast<std::size_t>(a)];
    WzCode w;
    w.usize = nu * nv;
    w.assignment = w_map;
    return optimal_reconstruction(joint_z, w.rows(na), nu * nv, rho2);
  };

  Result best;
  bool have = false;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    std::vector<int> v_map(static_cast<std::size_t>(na));
    if (r == 0) {
      for (std::int64_t a = 0; a < na; ++a)
        v_map[static_cast<std::size_t>(a)] = static_cast<int>(a % nv);
    } else {
      Rng rng(derive_seed(seed, "sr_restart", static_cast<std::uint64_t>(r)));
      for (std::int64_t a = 0; a < na; ++a)
        v_map[static_cast<std::size_t>(a)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(nv)));
    }
    std::vector<int> h2 = recon_w(v_map);
    double d2, hvu;
    eval(v_map, h2, d2, hvu);
    double obj = d2 + lambda2 * hvu / ell;
    bool converged = false;
    for (int iter = 0; iter < 500; ++iter) {
      const double prev = obj;
      // conditional marginals q(v|u)
      std::vector<double> quv(static_cast<std::size_t>(nu) * nv, 0.0);
      for (std::int64_t a = 0; a < na; ++a)
        quv[static_cast<std::size_t>(u_map[static_cast<std::size_t>(a)] * nv +
                                     v_map[static_cast<std::size_t>(a)])] +=
            source.probs[static_cast<std::size_t>(a)];
      // assignment step
      for (std::int64_t a = 0; a < na; ++a) {
        const int u = u_map[static_cast<std::size_t>(a)];
        if (ucell_mass[static_cast<std::size_t>(u)] <= 0.0) continue;
        int best_v = v_map[static_cast<std::size_t>(a)];
        double best_cost = std::numeric_limits<double>::infinity();
        for (int v = 0; v < nv; ++v) {
          const double qc = quv[static_cast<std::size_t>(u * nv + v)] /
                            ucell_mass[static_cast<std::size_t>(u)];
          if (qc <= 0.0) continue;  // retired cell
          double c = 0.0;
          for (std::int64_t zb = 0; zb < joint_z.nb; ++zb) {
            const int xh = h2[static_cast<std::size_t>(zb) * (nu * nv) +
                              static_cast<std::size_t>(u * nv + v)];
            // accumulate block distortion of xh against a
            double rb = 0.0;
            std::vector<int> asym(static_cast<std::size_t>(ell)), hsym(static_cast<std::size_t>(ell));
            block_symbols(a, source.alphabet, ell, asym);
            block_symbols(xh, rho2.recon_size(), ell, hsym);
            for (int i = 0; i < ell; ++i)
              rb += rho2.at(asym[static_cast<std::size_t>(i)], hsym[static_cast<std::size_t>(i)]);
            c += joint_z.cond[static_cast<std::size_t>(a * joint_z.nb + zb)] * rb;
          }
          if (lambda2 > 0.0) c -= lambda2 * std::log2(qc);
          if (c < best_cost) {
            best_cost = c;
            best_v = v;
          }
        }
        v_map[static_cast<std::size_t>(a)] = best_v;
      }
      h2 = recon_w(v_map);
      eval(v_map, h2, d2, hvu);
      obj = d2 + lambda2 * hvu / ell;
      require(obj <= prev + 1e-9, ErrorCode::kInternal,
              "conditional descent objective increased");
      if (prev - obj < 1e-10) {
        converged = true;
        break;
      }
    }
    if (!have || obj < best.objective ||
        (obj == best.objective && v_map < best.v_map)) {
      best = {v_map, obj, d2, hvu, converged};
      have = true;
    }
  }

  SrPoint p;
  p.d1 = d1;
  p.d2 = best.d2;
  p.hu = hu;
  p.hv_given_u = best.hvu;
  p.u_map = u_map;
  p.v_map = best.v_map;
  p.converged = best.converged;
  return p;
}

}  // namespace wzis
