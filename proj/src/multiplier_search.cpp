#include "wstress/multiplier_search.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "wstress/error.hpp"

namespace wstress {

namespace {

class Search {
 public:
  Search(const ResidualFn& fn, std::vector<double> lower, std::vector<double> upper, std::vector<double> tol,
         const SearchOptions& opts)
      : fn_(fn), lower_(std::move(lower)), upper_(std::move(upper)), tol_(std::move(tol)), opts_(opts) {}

  SearchResult run(std::vector<double> lambda) {
    const std::size_t d = lambda.size();
    clamp(lambda);
    SearchResult res;
    res.lambda = lambda;
    res.residual = eval(lambda);
    if (d == 0 || done(res.residual, opts_.inner_factor)) return finish(res);
    if (d == 1) {
      solve_coordinate(res, 0);
      return finish(res);
    }
    for (; res.iterations < opts_.max_iter; ++res.iterations) {
      if (done(res.residual, opts_.inner_factor)) break;
      const double before = merit(res.residual);
      if (!newton_step(res)) {
        for (std::size_t k = 0; k < d; ++k) solve_coordinate(res, k);
        if (!(merit(res.residual) < before * (1.0 - 1e-9))) break;  // stagnation
      }
    }
    return finish(res);
  }

 private:
  std::vector<double> eval(std::span<const double> lambda) {
    ++evaluations_;
    auto r = fn_(lambda);
    if (r.size() != lambda.size()) throw InvalidArgument("multiplier_search: residual dimension mismatch");
    return r;
  }

  void clamp(std::vector<double>& lambda) const {
    for (std::size_t k = 0; k < lambda.size(); ++k) lambda[k] = std::clamp(lambda[k], lower_[k], upper_[k]);
  }

  bool done(const std::vector<double>& r, double factor) const {
    for (std::size_t k = 0; k < r.size(); ++k)
      if (!(std::abs(r[k]) <= factor * tol_[k])) return false;
    return true;
  }

  double merit(const std::vector<double>& r) const {
    double s = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double z = r[k] / tol_[k];
      s += z * z;
    }
    return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
  }

  SearchResult finish(SearchResult& res) {
    res.converged = done(res.residual, 1.0);
    res.evaluations = evaluations_;
    return res;
  }

  bool newton_step(SearchResult& res) {
    const std::size_t d = res.lambda.size();
    Eigen::MatrixXd jac(d, d);
    Eigen::VectorXd r(d);
    for (std::size_t k = 0; k < d; ++k) r(k) = res.residual[k];
    for (std::size_t k = 0; k < d; ++k) {
      auto probe = res.lambda;
      double h = 1e-6 * (1.0 + std::abs(probe[k]));
      if (probe[k] + h > upper_[k]) h = -h;
      probe[k] += h;
      const auto rk = eval(probe);
      for (std::size_t i = 0; i < d; ++i) jac(i, k) = (rk[i] - res.residual[i]) / h;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    lu.setThreshold(1e-12);
    if (lu.rank() < static_cast<Eigen::Index>(d)) return false;
    const Eigen::VectorXd step = lu.solve(-r);
    if (!step.allFinite()) return false;

    const double base = merit(res.residual);
    double t = 1.0;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      auto trial = res.lambda;
      for (std::size_t k = 0; k < d; ++k) trial[k] += t * step(static_cast<Eigen::Index>(k));
      clamp(trial);
      auto rt = eval(trial);
      if (merit(rt) < base) {
        res.lambda = std::move(trial);
        res.residual = std::move(rt);
        return true;
      }
    }
    return false;
  }

  // 1-D bracket and Illinois false position on component k of the residual,
  // varying lambda_k with the other multipliers held fixed.
  void solve_coordinate(SearchResult& res, std::size_t k) {
    auto at = [&](double x) {
      auto lam = res.lambda;
      lam[k] = x;
      return eval(lam);
    };
    const double target_tol = opts_.inner_factor * tol_[k];
    double x0 = res.lambda[k];
    auto r0 = res.residual;
    if (std::abs(r0[k]) <= target_tol) return;

    auto accept = [&](double x, std::vector<double> r) {
      res.lambda[k] = x;
      res.residual = std::move(r);
    };

    // derivative estimate for the first probe
    double h = 1e-6 * (1.0 + std::abs(x0));
    if (x0 + h > upper_[k]) h = -h;
    const auto rh = at(x0 + h);
    const double slope = (rh[k] - r0[k]) / h;
    double step = (std::isfinite(slope) && slope != 0.0) ? -r0[k] / slope : 1e-3 * (1.0 + std::abs(x0));
    if (!std::isfinite(step) || step == 0.0) step = 1e-3 * (1.0 + std::abs(x0));

    // bracket
    double xa = x0, fa = r0[k];
    std::vector<double> ra = r0;
    double xb = x0, fb = fa;
    std::vector<double> rb;
    bool bracketed = false;
    for (int expand = 0; expand < 80 && !bracketed; ++expand) {
      double xt = std::clamp(xa + step, lower_[k], upper_[k]);
      if (xt == xa) {
        step = -step;
        xt = std::clamp(xa + step, lower_[k], upper_[k]);
        if (xt == xa) break;
      }
      auto rt = at(xt);
      const double ft = rt[k];
      if (!std::isfinite(ft)) {
        step *= 0.5;
        continue;
      }
      if (std::abs(ft) <= target_tol) {
        accept(xt, std::move(rt));
        return;
      }
      if ((ft > 0.0) != (fa > 0.0)) {
        xb = xt;
        fb = ft;
        rb = std::move(rt);
        bracketed = true;
        break;
      }
      if (std::abs(ft) < std::abs(fa)) {
        xa = xt;
        fa = ft;
        ra = std::move(rt);
        step *= 2.0;
      } else {
        step = -2.0 * step;
      }
    }
    if (!bracketed) {
      if (std::abs(fa) < std::abs(res.residual[k])) accept(xa, std::move(ra));
      return;
    }

    // Illinois
    int side = 0;
    for (int iter = 0; iter < 200; ++iter) {
      double xm = (xa * fb - xb * fa) / (fb - fa);
      if (!(xm > std::min(xa, xb) && xm < std::max(xa, xb))) xm = 0.5 * (xa + xb);
      auto rm = at(xm);
      const double fm = rm[k];
      if (std::abs(fm) <= target_tol || std::abs(xb - xa) <= 1e-15 * (1.0 + std::abs(xm))) {
        accept(xm, std::move(rm));
        return;
      }
      if ((fm > 0.0) == (fb > 0.0)) {
        xb = xm;
        fb = fm;
        rb = rm;
        if (side == -1) fa *= 0.5;
        side = -1;
      } else {
        xa = xm;
        fa = fm;
        ra = rm;
        if (side == 1) fb *= 0.5;
        side = 1;
      }
    }
    if (std::abs(ra[k]) <= std::abs(rb[k])) {
      accept(xa, std::move(ra));
    } else {
      accept(xb, std::move(rb));
    }
  }

  const ResidualFn& fn_;
  std::vector<double> lower_, upper_, tol_;
  SearchOptions opts_;
  int evaluations_ = 0;
};

}  // namespace

SearchResult multiplier_search(const ResidualFn& residual, std::vector<double> lambda0, std::vector<double> lower,
                               std::vector<double> upper, std::vector<double> tol, const SearchOptions& opts) {
  const std::size_t d = lambda0.size();
  require(lower.size() == d && upper.size() == d && tol.size() == d, "multiplier_search: dimension mismatch");
  for (std::size_t k = 0; k < d; ++k) {
    require(lower[k] <= upper[k], "multiplier_search: empty bounds");
    require(tol[k] > 0.0, "multiplier_search: tolerances must be positive");
  }
  Search s(residual, std::move(lower), std::move(upper), std::move(tol), opts);
  return s.run(std::move(lambda0));
}

SearchResult multiplier_search(const ResidualFn& residual, std::size_t dim, std::vector<double> tol,
                               const SearchOptions& opts) {
  const double inf = std::numeric_limits<double>::infinity();
  return multiplier_search(residual, std::vector<double>(dim, 0.0), std::vector<double>(dim, -inf),
                           std::vector<double>(dim, inf), std::move(tol), opts);
}

}  // namespace wstress
