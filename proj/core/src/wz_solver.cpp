#include "wzis/wz_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wzis/error.hpp"
#include "wzis/hull.hpp"

namespace wzis {

std::vector<double> WzCode::rows(std::int64_t na) const {
  std::vector<double> r(static_cast<std::size_t>(na) * usize, 0.0);
  for (std::int64_t a = 0; a < na; ++a)
    r[static_cast<std::size_t>(a) * usize + static_cast<std::size_t>(assignment[static_cast<std::size_t>(a)])] = 1.0;
  return r;
}

double entropy_bits(std::span<const double> pmf) {
  double h = 0.0;
  for (double p : pmf)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

void RdCurve::finalize() {
  std::vector<XY> pts;
  pts.reserve(points_.size());
  for (const auto& p : points_) pts.push_back({p.rate, p.distortion});
  hull_ = lower_hull_frontier(pts);
}

bool RdCurve::on_hull(int index) const {
  for (int h : hull_)
    if (h == index) return true;
  return false;
}

double RdCurve::query(double rate) const {
  require(!hull_.empty(), ErrorCode::kEmptyGrid, "query on unfinalized curve");
  std::vector<XY> pts;
  pts.reserve(points_.size());
  for (const auto& p : points_) pts.push_back({p.rate, p.distortion});
  return frontier_query(pts, hull_, rate);
}

double RdCurve::pointwise_query(double rate) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points_)
    if (p.rate <= rate + 1e-12) best = std::min(best, p.distortion);
  return best;
}

namespace {

// Shared precomputation for one (joint, rho) instance.
struct SolverContext {
  const JointBlockDistribution* joint;
  const DistortionMatrix* rho;
  int ell;
  std::int64_t na, nb, ng;       // alpha^ell, beta^ell, gamma^ell
  int alpha, gamma;
  std::vector<int> a_syms;       // na x ell
  std::vector<double> rho_block; // na x ng, additive block distortion

  SolverContext(const JointBlockDistribution& j, const DistortionMatrix& r)
      : joint(&j), rho(&r), ell(j.block_len), na(j.na), nb(j.nb) {
    alpha = j.source.alphabet;
    gamma = r.recon_size();
    ng = pow_int(gamma, ell);
    require(na * ng <= (std::int64_t{1} << 24), ErrorCode::kTableTooLarge,
            "block distortion table too large");
    a_syms.resize(static_cast<std::size_t>(na) * ell);
    for (std::int64_t a = 0; a < na; ++a)
      block_symbols(a, alpha, ell, {a_syms.data() + a * ell, static_cast<std::size_t>(ell)});
    rho_block.resize(static_cast<std::size_t>(na) * ng);
    std::vector<int> gbuf(static_cast<std::size_t>(ell));
    for (std::int64_t g = 0; g < ng; ++g) {
      block_symbols(g, gamma, ell, gbuf);
      for (std::int64_t a = 0; a < na; ++a) {
        double s = 0.0;
        for (int i = 0; i < ell; ++i)
          s += r.at(a_syms[static_cast<std::size_t>(a * ell + i)], gbuf[static_cast<std::size_t>(i)]);
        rho_block[static_cast<std::size_t>(a * ng + g)] = s;
      }
    }
  }

  int a_sym(std::int64_t a, int i) const { return a_syms[static_cast<std::size_t>(a * ell + i)]; }
  double rho_blk(std::int64_t a, std::int64_t g) const {
    return rho_block[static_cast<std::size_t>(a * ng + g)];
  }
};

// Coordinate-wise optimal block for a posterior weight vector over a.
std::int64_t best_block(const SolverContext& cx, std::span<const double> w) {
  double total = 0.0;
  for (double v : w) total += v;
  if (total <= 0.0) return 0;  // zero-probability cell: all-0 block
  std::int64_t id = 0;
  std::vector<double> letter(static_cast<std::size_t>(cx.alpha));
  for (int i = 0; i < cx.ell; ++i) {
    std::fill(letter.begin(), letter.end(), 0.0);
    for (std::int64_t a = 0; a < cx.na; ++a)
      letter[static_cast<std::size_t>(cx.a_sym(a, i))] += w[static_cast<std::size_t>(a)];
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int xh = 0; xh < cx.gamma; ++xh) {
      double c = 0.0;
      for (int v = 0; v < cx.alpha; ++v)
        c += letter[static_cast<std::size_t>(v)] * cx.rho->at(v, xh);
      if (c < best_cost) {
        best_cost = c;
        best = xh;
      }
    }
    id = id * cx.gamma + best;
  }
  return id;
}

std::vector<int> recon_for_rows(const SolverContext& cx, std::span<const double> rows, int usize) {
  std::vector<int> h(static_cast<std::size_t>(cx.nb) * usize, 0);
  std::vector<double> w(static_cast<std::size_t>(cx.na));
  for (int u = 0; u < usize; ++u) {
    for (std::int64_t b = 0; b < cx.nb; ++b) {
      for (std::int64_t a = 0; a < cx.na; ++a)
        w[static_cast<std::size_t>(a)] = cx.joint->source_prob(a) *
                                         rows[static_cast<std::size_t>(a) * usize + u] *
                                         cx.joint->cond[static_cast<std::size_t>(a * cx.nb + b)];
      h[static_cast<std::size_t>(b) * usize + static_cast<std::size_t>(u)] =
          static_cast<int>(best_block(cx, w));
    }
  }
  return h;
}

std::vector<int> recon_for_assignment(const SolverContext& cx, std::span<const int> assign,
                                      int usize) {
  std::vector<int> h(static_cast<std::size_t>(cx.nb) * usize, 0);
  std::vector<double> w(static_cast<std::size_t>(cx.na));
  for (int u = 0; u < usize; ++u) {
    for (std::int64_t b = 0; b < cx.nb; ++b) {
      for (std::int64_t a = 0; a < cx.na; ++a)
        w[static_cast<std::size_t>(a)] =
            assign[static_cast<std::size_t>(a)] == u
                ? cx.joint->source_prob(a) * cx.joint->cond[static_cast<std::size_t>(a * cx.nb + b)]
                : 0.0;
      h[static_cast<std::size_t>(b) * usize + static_cast<std::size_t>(u)] =
          static_cast<int>(best_block(cx, w));
    }
  }
  return h;
}

std::vector<double> marginal_of(const SolverContext& cx, std::span<const int> assign, int usize) {
  std::vector<double> q(static_cast<std::size_t>(usize), 0.0);
  for (std::int64_t a = 0; a < cx.na; ++a)
    q[static_cast<std::size_t>(assign[static_cast<std::size_t>(a)])] += cx.joint->source_prob(a);
  return q;
}

double distortion_of(const SolverContext& cx, std::span<const int> assign,
                     std::span<const int> h, int usize) {
  double d = 0.0;
  for (std::int64_t a = 0; a < cx.na; ++a) {
    const double pa = cx.joint->source_prob(a);
    if (pa == 0.0) continue;
    const int u = assign[static_cast<std::size_t>(a)];
    double da = 0.0;
    for (std::int64_t b = 0; b < cx.nb; ++b)
      da += cx.joint->cond[static_cast<std::size_t>(a * cx.nb + b)] *
            cx.rho_blk(a, h[static_cast<std::size_t>(b) * usize + static_cast<std::size_t>(u)]);
    d += pa * da;
  }
  return d / cx.ell;
}

struct DescentResult {
  std::vector<int> assignment;
  std::vector<double> marginal;
  std::vector<int> recon;
  double objective = 0.0;
  double distortion = 0.0;
  double entropy = 0.0;
  bool converged = false;
};

DescentResult descend(const SolverContext& cx, double lambda, int usize,
                      std::vector<int> assign) {
  constexpr double kTol = 1e-10;
  constexpr int kMaxIters = 500;
  // Monotonicity slack for the per-step check; violations indicate a bug.
  constexpr double kMonotoneSlack = 1e-9;

  std::vector<double> q = marginal_of(cx, assign, usize);
  std::vector<int> h = recon_for_assignment(cx, assign, usize);
  double dist = distortion_of(cx, assign, h, usize);
  double ent = entropy_bits(q);
  double obj = dist + lambda * ent / cx.ell;

  DescentResult res;
  res.converged = false;
  for (int iter = 0; iter < kMaxIters; ++iter) {
    // (1) assignment: per-a argmin of expected distortion + lambda code length
    const double prev_obj = obj;
    for (std::int64_t a = 0; a < cx.na; ++a) {
      int best_u = assign[static_cast<std::size_t>(a)];
      double best_cost = std::numeric_limits<double>::infinity();
      for (int u = 0; u < usize; ++u) {
        if (q[static_cast<std::size_t>(u)] <= 0.0) continue;  // retired cell
        double c = 0.0;
        for (std::int64_t b = 0; b < cx.nb; ++b)
          c += cx.joint->cond[static_cast<std::size_t>(a * cx.nb + b)] *
               cx.rho_blk(a, h[static_cast<std::size_t>(b) * usize + static_cast<std::size_t>(u)]);
        if (lambda > 0.0) c -= lambda * std::log2(q[static_cast<std::size_t>(u)]);
        if (c < best_cost) {
          best_cost = c;
          best_u = u;
        }
      }
      assign[static_cast<std::size_t>(a)] = best_u;
    }
    // (2) marginal update
    q = marginal_of(cx, assign, usize);
    dist = distortion_of(cx, assign, h, usize);
    ent = entropy_bits(q);
    obj = dist + lambda * ent / cx.ell;
    require(obj <= prev_obj + kMonotoneSlack, ErrorCode::kInternal,
            "descent objective increased after assignment step");
    // (3) reconstruction update
    const double mid_obj = obj;
    h = recon_for_assignment(cx, assign, usize);
    dist = distortion_of(cx, assign, h, usize);
    obj = dist + lambda * ent / cx.ell;
    require(obj <= mid_obj + kMonotoneSlack, ErrorCode::kInternal,
            "descent objective increased after reconstruction step");
    if (prev_obj - obj < kTol) {
      res.converged = true;
      break;
    }
  }
  res.assignment = std::move(assign);
  res.marginal = std::move(q);
  res.recon = std::move(h);
  res.objective = obj;
  res.distortion = dist;
  res.entropy = ent;
  return res;
}

OperatingPoint to_point(const SolverContext& cx, double lambda, int usize, DescentResult r) {
  OperatingPoint p;
  p.lambda = lambda;
  p.rate = r.entropy / cx.ell;
  p.distortion = r.distortion;
  p.converged = r.converged;
  p.code.usize = usize;
  p.code.assignment = std::move(r.assignment);
  p.code.marginal = std::move(r.marginal);
  p.code.reconstruction = std::move(r.recon);
  return p;
}

}  // namespace

std::vector<int> optimal_reconstruction(const JointBlockDistribution& joint,
                                        std::span<const double> rows, int usize,
                                        const DistortionMatrix& rho) {
  SolverContext cx(joint, rho);
  require(static_cast<std::int64_t>(rows.size()) == cx.na * usize, ErrorCode::kConfigError,
          "test channel table has wrong shape");
  for (std::int64_t a = 0; a < cx.na; ++a) {
    double s = 0.0;
    for (int u = 0; u < usize; ++u) {
      const double v = rows[static_cast<std::size_t>(a) * usize + static_cast<std::size_t>(u)];
      require(v >= 0.0, ErrorCode::kNegativeEntry, "test channel entries must be nonnegative");
      s += v;
    }
    require(std::abs(s - 1.0) <= kStochasticTol, ErrorCode::kNonStochasticRow,
            "test channel rows must be stochastic");
  }
  return recon_for_rows(cx, rows, usize);
}

OperatingPoint solve_lagrangian(const JointBlockDistribution& joint, const DistortionMatrix& rho,
                                double lambda, int usize, Seed seed, int restarts) {
  require(usize >= 1, ErrorCode::kConfigError, "usize must be >= 1");
  require(lambda >= 0.0, ErrorCode::kConfigError, "lambda must be >= 0");
  SolverContext cx(joint, rho);
  require(usize <= cx.na + 1, ErrorCode::kCapExceeded,
          "usize exceeds alpha^ell + 1");
  restarts = std::max(restarts, 1);

  DescentResult best;
  bool have = false;
  for (int r = 0; r < restarts; ++r) {
    std::vector<int> init(static_cast<std::size_t>(cx.na));
    if (r == 0) {
      for (std::int64_t a = 0; a < cx.na; ++a)
        init[static_cast<std::size_t>(a)] = static_cast<int>(a % usize);
    } else {
      Rng rng(derive_seed(seed, "wz_restart", static_cast<std::uint64_t>(r)));
      for (std::int64_t a = 0; a < cx.na; ++a)
        init[static_cast<std::size_t>(a)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(usize)));
    }
    DescentResult res = descend(cx, lambda, usize, std::move(init));
    if (!have || res.objective < best.objective ||
        (res.objective == best.objective && res.assignment < best.assignment)) {
      best = std::move(res);
      have = true;
    }
  }
  return to_point(cx, lambda, usize, std::move(best));
}

RdCurve drf_curve(const JointBlockDistribution& joint, const DistortionMatrix& rho,
                  std::span<const double> lambda_grid, int usize, Seed seed, int restarts) {
  require(!lambda_grid.empty(), ErrorCode::kEmptyGrid, "lambda grid is empty");
  std::vector<double> lambdas(lambda_grid.begin(), lambda_grid.end());
  for (double extreme : {0.0, 1e6}) {
    bool present = false;
    for (double l : lambdas)
      if (l == extreme) present = true;
    if (!present) lambdas.push_back(extreme);
  }
  std::sort(lambdas.begin(), lambdas.end());
  RdCurve curve;
  for (double l : lambdas) curve.add(solve_lagrangian(joint, rho, l, usize, seed, restarts));
  curve.finalize();
  return curve;
}

RdCurve drf_curve_adaptive(const JointBlockDistribution& joint, const DistortionMatrix& rho,
                           int usize, Seed seed, int restarts, int max_points) {
  std::vector<double> solved;
  RdCurve curve;
  auto solve_at = [&](double l) {
    curve.add(solve_lagrangian(joint, rho, l, usize, seed, restarts));
    solved.push_back(l);
  };
  solve_at(0.0);
  solve_at(1e6);
  bool grew = true;
  while (grew && static_cast<int>(solved.size()) < max_points) {
    curve.finalize();
    const auto& pts = curve.points();
    const auto& hull = curve.hull();
    std::vector<double> fresh;
    for (std::size_t i = 1; i < hull.size(); ++i) {
      const auto& a = pts[static_cast<std::size_t>(hull[i - 1])];
      const auto& b = pts[static_cast<std::size_t>(hull[i])];
      if (b.rate - a.rate < 1e-12) continue;
      const double mid = (a.distortion - b.distortion) / (b.rate - a.rate);
      if (mid <= 0.0) continue;
      bool seen = false;
      for (double l : solved)
        if (std::abs(l - mid) <= 1e-9 * std::max(1.0, std::abs(mid))) seen = true;
      for (double l : fresh)
        if (std::abs(l - mid) <= 1e-9 * std::max(1.0, std::abs(mid))) seen = true;
      if (!seen) fresh.push_back(mid);
    }
    std::sort(fresh.begin(), fresh.end());
    grew = false;
    for (double l : fresh) {
      if (static_cast<int>(solved.size()) >= max_points) break;
      solve_at(l);
      grew = true;
    }
  }
  curve.finalize();
  return curve;
}

double code_distortion(const JointBlockDistribution& joint, const DistortionMatrix& rho,
                       const WzCode& code) {
  SolverContext cx(joint, rho);
  require(static_cast<std::int64_t>(code.assignment.size()) == cx.na, ErrorCode::kConfigError,
          "code assignment has wrong size");
  return distortion_of(cx, code.assignment, code.reconstruction, code.usize);
}

RdCurve brute_force_drf(const JointBlockDistribution& joint, const DistortionMatrix& rho,
                        int usize) {
  SolverContext cx(joint, rho);
  require(cx.na <= 8, ErrorCode::kCapExceeded, "brute force requires alpha^ell <= 8");
  require(usize >= 1 && usize <= cx.na + 1, ErrorCode::kCapExceeded,
          "brute force requires |U| <= alpha^ell + 1");
  RdCurve curve;
  std::vector<int> assign(static_cast<std::size_t>(cx.na), 0);
  for (;;) {
    std::vector<double> q = marginal_of(cx, assign, usize);
    std::vector<int> h = recon_for_assignment(cx, assign, usize);
    OperatingPoint p;
    p.lambda = -1.0;  // oracle point, not produced by a multiplier
    p.rate = entropy_bits(q) / cx.ell;
    p.distortion = distortion_of(cx, assign, h, usize);
    p.converged = true;
    p.code.usize = usize;
    p.code.assignment = assign;
    p.code.marginal = std::move(q);
    p.code.reconstruction = std::move(h);
    curve.add(std::move(p));
    // next map in mixed radix
    std::int64_t pos = cx.na - 1;
    while (pos >= 0) {
      if (++assign[static_cast<std::size_t>(pos)] < usize) break;
      assign[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  curve.finalize();
  return curve;
}

}  // namespace wzis
