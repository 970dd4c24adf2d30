#pragma once

// Independent reference solutions used by the unit and acceptance tests.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

struct LinearIneq {
  std::vector<double> a;  // a . x <= c
  double c;
};

// Exhaustive active-set QP:
//   min sum w_i (x_i - v_i)^2 + sum p_i (x_{i+1} - x_i)^2
//   s.t. x nondecreasing, a_k . x <= c_k.
// Every partition of 0..n-1 into consecutive blocks (ties) and every subset
// of active inequalities gives an equality-constrained QP; the best feasible
// candidate is the optimum.
inline std::vector<double> qp(const std::vector<double>& v, const std::vector<double>& w,
                              const std::vector<double>& p = {}, const std::vector<LinearIneq>& ineq = {}) {
  const int n = static_cast<int>(v.size());
  const int K = static_cast<int>(ineq.size());
  auto objective = [&](const Eigen::VectorXd& x) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += w[i] * (x[i] - v[i]) * (x[i] - v[i]);
    for (int i = 0; i + 1 < n && !p.empty(); ++i) s += p[i] * (x[i + 1] - x[i]) * (x[i + 1] - x[i]);
    return s;
  };
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd lin = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    Q(i, i) += w[i];
    lin[i] += w[i] * v[i];
  }
  for (int i = 0; i + 1 < n && !p.empty(); ++i) {
    Q(i, i) += p[i];
    Q(i + 1, i + 1) += p[i];
    Q(i, i + 1) -= p[i];
    Q(i + 1, i) -= p[i];
  }
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  for (long mask = 0; mask < (1L << (n - 1)); ++mask) {
    // bit i set: x_i and x_{i+1} tied
    std::vector<int> block(n);
    int m = 0;
    for (int i = 0; i < n; ++i) {
      if (i > 0 && !((mask >> (i - 1)) & 1L)) ++m;
      block[i] = m;
    }
    ++m;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, m);
    for (int i = 0; i < n; ++i) P(i, block[i]) = 1.0;
    const Eigen::MatrixXd H = P.transpose() * Q * P;
    const Eigen::VectorXd g = P.transpose() * lin;
    for (long act = 0; act < (1L << K); ++act) {
      std::vector<int> idx;
      for (int k = 0; k < K; ++k)
        if ((act >> k) & 1L) idx.push_back(k);
      const int a = static_cast<int>(idx.size());
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + a, m + a);
      Eigen::VectorXd rhs(m + a);
      kkt.topLeftCorner(m, m) = H;
      rhs.head(m) = g;
      for (int r = 0; r < a; ++r) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) row[i] = ineq[idx[r]].a[i];
        const Eigen::VectorXd prow = P.transpose() * row;
        kkt.block(m + r, 0, 1, m) = prow.transpose();
        kkt.block(0, m + r, m, 1) = prow;
        rhs[m + r] = ineq[idx[r]].c;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd sol = lu.solve(rhs);
      const Eigen::VectorXd x = P * sol.head(m);
      bool ok = true;
      for (int i = 0; i + 1 < n; ++i) ok = ok && x[i] <= x[i + 1] + 1e-11;
      for (int k = 0; k < K; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += ineq[k].a[i] * x[i];
        ok = ok && s <= ineq[k].c + 1e-10;
      }
      if (!ok) continue;
      const double obj = objective(x);
      if (obj < best) {
        best = obj;
        best_x = x;
      }
    }
  }
  return std::vector<double>(best_x.data(), best_x.data() + best_x.size());
}

// Bisection for a nondecreasing scalar function; returns x with f(x) ~ 0.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  while (f(lo) > 0.0) lo -= 2.0 * (hi - lo + 1.0);
  while (f(hi) < 0.0) hi += 2.0 * (hi - lo + 1.0);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace oracle
