#include "wstress/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wstress/error.hpp"

namespace wstress {

namespace {

void check_inputs(std::span<const double> values, std::span<const double> weights) {
  require(values.size() == weights.size(), "isotonic: values and weights differ in length");
  require(!values.empty(), "isotonic: empty input");
  bool any_positive = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(std::isfinite(values[i]), "isotonic: non-finite value at index " + std::to_string(i));
    require(std::isfinite(weights[i]) && weights[i] >= 0.0,
            "isotonic: weights must be finite and nonnegative");
    any_positive = any_positive || weights[i] > 0.0;
  }
  require(any_positive, "isotonic: all weights are zero");
}

struct PavBlock {
  double value;
  double weight;
  double plain_sum;
  std::size_t count;
};

// Forward-eliminated row of the block-reduced tridiagonal system. `bhat` and
// `dhat` exclude the coupling to the successor block, which is added when a
// successor exists.
struct SpavBlock {
  std::size_t start;
  double weight;
  double wsum;
  double coupling;  // penalty tying this block to its predecessor
  double bhat;
  double dhat;
};

void eliminate(SpavBlock& b, const SpavBlock* prev) {
  if (prev == nullptr) {
    b.bhat = b.weight;
    b.dhat = b.wsum;
    return;
  }
  const double den = prev->bhat + b.coupling;
  if (den <= 0.0) {
    b.bhat = b.weight;
    b.dhat = b.wsum;
    return;
  }
  b.bhat = b.weight + b.coupling * prev->bhat / den;
  b.dhat = b.wsum + b.coupling * prev->dhat / den;
}

// Block values for a fixed partition by Thomas back-substitution.
std::vector<double> back_substitute(const std::vector<SpavBlock>& blocks) {
  const std::size_t m = blocks.size();
  std::vector<double> x(m);
  x[m - 1] = blocks[m - 1].dhat / blocks[m - 1].bhat;
  for (std::size_t j = m - 1; j-- > 0;) {
    const double z = blocks[j + 1].coupling;
    const double den = blocks[j].bhat + z;
    x[j] = den > 0.0 ? (blocks[j].dhat + z * x[j + 1]) / den : x[j + 1];
  }
  return x;
}

std::vector<SpavBlock> build_blocks(const std::vector<std::size_t>& starts, std::span<const double> values,
                                    std::span<const double> weights, std::span<const double> penalty) {
  const std::size_t n = values.size();
  std::vector<SpavBlock> blocks;
  blocks.reserve(starts.size());
  for (std::size_t j = 0; j < starts.size(); ++j) {
    const std::size_t s = starts[j];
    const std::size_t e = j + 1 < starts.size() ? starts[j + 1] : n;
    SpavBlock b{s, 0.0, 0.0, s > 0 ? penalty[s - 1] : 0.0, 0.0, 0.0};
    for (std::size_t i = s; i < e; ++i) {
      b.weight += weights[i];
      b.wsum += weights[i] * values[i];
    }
    eliminate(b, blocks.empty() ? nullptr : &blocks.back());
    blocks.push_back(b);
  }
  return blocks;
}

std::vector<double> expand(const std::vector<SpavBlock>& blocks, const std::vector<double>& bx, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const std::size_t e = j + 1 < blocks.size() ? blocks[j + 1].start : n;
    std::fill(x.begin() + static_cast<std::ptrdiff_t>(blocks[j].start), x.begin() + static_cast<std::ptrdiff_t>(e), bx[j]);
  }
  return x;
}

// Active-set refinement from a given partition. Splits blocks whose internal
// tie multipliers are negative and merges adjacent blocks that violate
// monotonicity until both primal and dual feasibility hold.
std::vector<double> refine(std::vector<std::size_t> starts, std::span<const double> values,
                           std::span<const double> weights, std::span<const double> penalty) {
  const std::size_t n = values.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(weights[i] * values[i]));
  const double tol = 1e-11 * std::max(1.0, scale);
  const std::size_t max_rounds = 4 * n + 16;

  for (std::size_t round = 0; round < max_rounds; ++round) {
    auto blocks = build_blocks(starts, values, weights, penalty);
    auto bx = back_substitute(blocks);

    bool merged = false;
    std::vector<std::size_t> next;
    next.reserve(starts.size());
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      if (j > 0 && bx[j - 1] > bx[j] && !next.empty() && next.back() == starts[j - 1]) {
        merged = true;  // drop starts[j]: block j joins block j-1
        continue;
      }
      next.push_back(starts[j]);
    }
    if (merged) {
      starts = std::move(next);
      continue;
    }

    auto x = expand(blocks, bx, n);
    bool split = false;
    std::vector<std::size_t> with_splits;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      const std::size_t s = blocks[j].start;
      const std::size_t e = j + 1 < blocks.size() ? blocks[j + 1].start : n;
      with_splits.push_back(s);
      double mu = 0.0;
      double worst = -tol;
      std::size_t worst_at = e;
      for (std::size_t i = s; i + 1 < e; ++i) {
        double g = weights[i] * (x[i] - values[i]);
        if (i > 0) g += penalty[i - 1] * (x[i] - x[i - 1]);
        g -= penalty[i] * (x[i + 1] - x[i]);
        mu -= g;
        if (mu < worst) {
          worst = mu;
          worst_at = i + 1;
        }
      }
      if (worst_at < e) {
        with_splits.push_back(worst_at);
        split = true;
      }
    }
    if (!split) return x;
    starts = std::move(with_splits);
  }
  throw InvalidArgument("spav: active-set refinement did not terminate");
}

}  // namespace

GridFunction::GridFunction(std::vector<double> abscissae, std::vector<double> values)
    : u(std::move(abscissae)), v(std::move(values)) {
  require(u.size() == v.size(), "GridFunction: abscissae and values differ in length");
  require(u.size() >= 2, "GridFunction: need at least two points");
  for (std::size_t i = 0; i < u.size(); ++i) {
    require(std::isfinite(u[i]) && std::isfinite(v[i]), "GridFunction: non-finite entry");
    require(u[i] > 0.0 && u[i] < 1.0, "GridFunction: abscissae must lie in (0,1)");
    // zero spacing would make the SPAV kernel 1/|du|^2 diverge
    if (i > 0) require(u[i] > u[i - 1], "GridFunction: abscissae must be strictly increasing");
  }
}

std::vector<double> pav(std::span<const double> values, std::span<const double> weights) {
  check_inputs(values, weights);
  std::vector<PavBlock> stack;
  stack.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    stack.push_back({values[i], weights[i], values[i], 1});
    while (stack.size() > 1 && stack[stack.size() - 2].value > stack.back().value) {
      PavBlock top = stack.back();
      stack.pop_back();
      PavBlock& prev = stack.back();
      const double w = prev.weight + top.weight;
      prev.plain_sum += top.plain_sum;
      prev.count += top.count;
      if (w > 0.0) {
        prev.value = (prev.weight * prev.value + top.weight * top.value) / w;
      } else {
        prev.value = prev.plain_sum / static_cast<double>(prev.count);
      }
      prev.weight = w;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : stack) out.insert(out.end(), b.count, b.value);
  return out;
}

std::vector<double> spav_penalised(std::span<const double> values, std::span<const double> weights,
                                   std::span<const double> penalty) {
  check_inputs(values, weights);
  const std::size_t n = values.size();
  require(penalty.size() + 1 == n, "spav: penalty must have length n-1");
  for (double p : penalty) require(std::isfinite(p) && p >= 0.0, "spav: smoothing penalties must be nonnegative");

  std::vector<SpavBlock> stack;
  stack.reserve(n);
  auto last_two_violate = [&]() {
    const SpavBlock& b = stack.back();
    const SpavBlock& a = stack[stack.size() - 2];
    const double den = a.bhat + b.coupling;
    if (b.bhat <= 0.0 || den <= 0.0) return true;  // undetermined block: tie it
    const double xb = b.dhat / b.bhat;
    const double xa = (a.dhat + b.coupling * xb) / den;
    return xa > xb;
  };
  for (std::size_t i = 0; i < n; ++i) {
    SpavBlock b{i, weights[i], weights[i] * values[i], i > 0 ? penalty[i - 1] : 0.0, 0.0, 0.0};
    eliminate(b, stack.empty() ? nullptr : &stack.back());
    stack.push_back(b);
    while (stack.size() > 1 && last_two_violate()) {
      SpavBlock top = stack.back();
      stack.pop_back();
      SpavBlock merged = stack.back();
      stack.pop_back();
      merged.weight += top.weight;
      merged.wsum += top.wsum;
      eliminate(merged, stack.empty() ? nullptr : &stack.back());
      stack.push_back(merged);
    }
  }

  std::vector<std::size_t> starts;
  starts.reserve(stack.size());
  for (const auto& b : stack) starts.push_back(b.start);
  return refine(std::move(starts), values, weights, penalty);
}

std::vector<double> spav(std::span<const double> values, std::span<const double> weights,
                         std::span<const double> u, double zeta) {
  require(std::isfinite(zeta) && zeta >= 0.0, "spav: zeta must be nonnegative");
  require(u.size() == values.size(), "spav: abscissae and values differ in length");
  if (zeta == 0.0) return pav(values, weights);
  std::vector<double> penalty(values.size() > 0 ? values.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double du = u[i + 1] - u[i];
    require(du > 0.0, "spav: abscissae must be strictly increasing");
    penalty[i] = zeta / (du * du);
  }
  return spav_penalised(values, weights, penalty);
}

std::vector<double> spav(std::span<const double> values, std::span<const double> weights, double zeta) {
  const std::size_t n = values.size();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  return spav(values, weights, u, zeta);
}

GridFunction project(const GridFunction& f, std::span<const double> w, double zeta) {
  GridFunction out;
  out.u = f.u;
  out.v = spav(f.v, w, f.u, zeta);
  return out;
}

}  // namespace wstress
