#include "falldet/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

#include "falldet/error.hpp"

namespace falldet {

namespace {

constexpr double kTau = 1e-12;

double kernel_eval(const KernelSpec& k, double gamma,
                   std::span<const double> a, std::span<const double> b) {
  double dot = 0.0;
  if (k.type == KernelSpec::LINEAR) {
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    dot += d * d;
  }
  return std::exp(-gamma * dot);
}

// Row-wise kernel cache with LRU eviction.
class KernelCache {
public:
  KernelCache(std::span<const LabeledFeature> data, const KernelSpec& kernel,
              double gamma, std::size_t budget_bytes = 64u << 20)
      : data_(data), kernel_(kernel), gamma_(gamma) {
    const std::size_t row_bytes = sizeof(double) * std::max<std::size_t>(1, data.size());
    max_rows_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
    diag_.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
      diag_[i] = kernel_eval(kernel_, gamma_, data_[i].values, data_[i].values);
  }

  double diag(std::size_t i) const { return diag_[i]; }

  const std::vector<double>& row(std::size_t i) {
    auto it = rows_.find(i);
    if (it != rows_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.second);
      return it->second.first;
    }
    if (rows_.size() >= max_rows_) {
      rows_.erase(lru_.back());
      lru_.pop_back();
    }
    std::vector<double> r(data_.size());
#pragma omp parallel for schedule(static)
    for (long t = 0; t < static_cast<long>(data_.size()); ++t)
      r[t] = kernel_eval(kernel_, gamma_, data_[i].values, data_[t].values);
    lru_.push_front(i);
    auto [pos, ok] =
        rows_.emplace(i, std::make_pair(std::move(r), lru_.begin()));
    return pos->second.first;
  }

private:
  std::span<const LabeledFeature> data_;
  KernelSpec kernel_;
  double gamma_;
  std::size_t max_rows_;
  std::vector<double> diag_;
  std::unordered_map<std::size_t,
                     std::pair<std::vector<double>, std::list<std::size_t>::iterator>>
      rows_;
  std::list<std::size_t> lru_;
};

struct SolveResult {
  std::vector<double> alpha;
  double rho = 0.0;       // decision = sum coef K - rho
  std::size_t iterations = 0;
  double rel_gap = 0.0;
};

// Maximal-violating-pair SMO for the two-class soft-margin dual
//   min 1/2 a'Qa - e'a,  0 <= a <= C,  y'a = 0,  Q_ij = y_i y_j K_ij.
SolveResult solve_two_class(std::span<const LabeledFeature> data,
                            const std::vector<double>& y, KernelCache& cache,
                            double C, double eps, double gap_tol,
                            std::size_t max_iter) {
  const std::size_t n = data.size();
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // G_i = (Qa)_i - 1

  const auto q = [&](std::size_t i, std::size_t t,
                     const std::vector<double>& row_i) {
    return y[i] * y[t] * row_i[t];
  };

  std::size_t iter = 0;
  double cur_eps = eps;
  while (true) {
    // maximal violating pair
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      const bool in_up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
      const bool in_low = (y[t] < 0 && alpha[t] < C) || (y[t] > 0 && alpha[t] > 0);
      if (in_up && v > m_up) {
        m_up = v;
        i = t;
      }
      if (in_low && v < m_low) {
        m_low = v;
        j = t;
      }
    }

    if (i >= n || j >= n || m_up - m_low <= cur_eps) {
      // KKT satisfied at cur_eps; verify the duality gap before accepting.
      double rho;
      {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t nr_free = 0;
        for (std::size_t t = 0; t < n; ++t) {
          const double yg = y[t] * grad[t];
          if (alpha[t] >= C) {
            if (y[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
          } else if (alpha[t] <= 0.0) {
            if (y[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
          } else {
            ++nr_free;
            sum_free += yg;
          }
        }
        rho = nr_free > 0 ? sum_free / static_cast<double>(nr_free) : (ub + lb) / 2;
      }
      const double b = -rho;
      double quad = 0.0, asum = 0.0, hinge = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        quad += alpha[t] * (grad[t] + 1.0);  // a'Qa
        asum += alpha[t];
        hinge += std::max(0.0, -grad[t] - y[t] * b);
      }
      const double primal = 0.5 * quad + C * hinge;
      const double gap = quad - asum + C * hinge;
      const double rel_gap = gap / std::max(1.0, std::fabs(primal));
      if (rel_gap <= gap_tol || i >= n || j >= n) {
        SolveResult r;
        r.alpha = std::move(alpha);
        r.rho = rho;
        r.iterations = iter;
        r.rel_gap = rel_gap;
        return r;
      }
      if (iter >= max_iter)
        raise_numeric("NonConvergence",
                      "SMO stopped after " + std::to_string(iter) +
                          " iterations with relative duality gap " +
                          std::to_string(rel_gap));
      cur_eps *= 0.25;  // tighten and keep going
      continue;
    }

    if (iter >= max_iter)
      raise_numeric("NonConvergence",
                    "SMO exceeded " + std::to_string(max_iter) + " iterations");
    ++iter;

    const std::vector<double>& row_i = cache.row(i);
    const std::vector<double>& row_j = cache.row(j);
    const double old_ai = alpha[i], old_aj = alpha[j];

    if (y[i] != y[j]) {
      // Direction e_i + e_j; cross term of Q flips sign with the labels, so
      // the curvature is the squared feature-space distance here too.
      double quad_coef = cache.diag(i) + cache.diag(j) - 2.0 * row_i[j];
      if (quad_coef <= 0) quad_coef = kTau;
      const double delta = (-grad[i] - grad[j]) / quad_coef;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > 0) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
      }
    } else {
      double quad_coef = cache.diag(i) + cache.diag(j) - 2.0 * row_i[j];
      if (quad_coef <= 0) quad_coef = kTau;
      const double delta = (grad[i] - grad[j]) / quad_coef;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
      }
      if (sum > C) {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t)
      grad[t] += q(i, t, row_i) * dai + q(j, t, row_j) * daj;
  }
}

// SMO for the one-class dual
//   min 1/2 a'Ka,  0 <= a <= 1/(nu*n),  sum a = 1.
SolveResult solve_one_class(std::span<const LabeledFeature> data,
                            KernelCache& cache, double nu, double eps,
                            double gap_tol, std::size_t max_iter) {
  const std::size_t n = data.size();
  const double C = 1.0 / (nu * static_cast<double>(n));

  std::vector<double> alpha(n, 0.0);
  const std::size_t full = std::min(
      n, static_cast<std::size_t>(nu * static_cast<double>(n)));
  double assigned = 0.0;
  for (std::size_t i = 0; i < full; ++i) {
    alpha[i] = C;
    assigned += C;
  }
  if (full < n && assigned < 1.0) alpha[full] = 1.0 - assigned;

  // G = K a
  std::vector<double> grad(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == 0.0) continue;
    const std::vector<double>& row_i = cache.row(i);
    for (std::size_t t = 0; t < n; ++t) grad[t] += row_i[t] * alpha[i];
  }

  std::size_t iter = 0;
  double cur_eps = eps;
  while (true) {
    double m_up = std::numeric_limits<double>::infinity();
    double m_low = -std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (alpha[t] < C && grad[t] < m_up) {
        m_up = grad[t];
        i = t;
      }
      if (alpha[t] > 0 && grad[t] > m_low) {
        m_low = grad[t];
        j = t;
      }
    }

    if (i >= n || j >= n || m_low - m_up <= cur_eps) {
      double rho;
      {
        double sum_free = 0.0;
        std::size_t nr_free = 0;
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
          if (alpha[t] > 0 && alpha[t] < C) {
            ++nr_free;
            sum_free += grad[t];
          } else if (alpha[t] <= 0) {
            ub = std::min(ub, grad[t]);
          } else {
            lb = std::max(lb, grad[t]);
          }
        }
        rho = nr_free > 0 ? sum_free / static_cast<double>(nr_free) : (ub + lb) / 2;
      }
      double quad = 0.0, hinge = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        quad += alpha[t] * grad[t];  // a'Ka
        hinge += std::max(0.0, rho - grad[t]);
      }
      const double primal = 0.5 * quad - rho + C * hinge;
      const double gap = quad - rho + C * hinge;
      const double rel_gap = gap / std::max(1.0, std::fabs(primal));
      if (rel_gap <= gap_tol || i >= n || j >= n) {
        SolveResult r;
        r.alpha = std::move(alpha);
        r.rho = rho;
        r.iterations = iter;
        r.rel_gap = rel_gap;
        return r;
      }
      if (iter >= max_iter)
        raise_numeric("NonConvergence",
                      "one-class SMO stopped after " + std::to_string(iter) +
                          " iterations with relative duality gap " +
                          std::to_string(rel_gap));
      cur_eps *= 0.25;
      continue;
    }

    if (iter >= max_iter)
      raise_numeric("NonConvergence",
                    "one-class SMO exceeded " + std::to_string(max_iter) +
                        " iterations");
    ++iter;

    const std::vector<double>& row_i = cache.row(i);
    const std::vector<double>& row_j = cache.row(j);
    double quad_coef = cache.diag(i) + cache.diag(j) - 2.0 * row_i[j];
    if (quad_coef <= 0) quad_coef = kTau;
    double delta = (grad[j] - grad[i]) / quad_coef;  // move mass j -> i
    delta = std::min(delta, std::min(C - alpha[i], alpha[j]));
    alpha[i] += delta;
    alpha[j] -= delta;
    for (std::size_t t = 0; t < n; ++t)
      grad[t] += (row_i[t] - row_j[t]) * delta;
  }
}

}  // namespace

SvmModel svm_train(std::span<const LabeledFeature> data, SvmParams params) {
  if (data.empty()) raise_data("EmptyTrainingSet", "svm_train with no data");
  const std::size_t dim = data.front().values.size();
  for (const LabeledFeature& f : data)
    if (f.values.size() != dim)
      raise_data("DimensionMismatch", "vector '" + f.id + "' has dimension " +
                                          std::to_string(f.values.size()) +
                                          ", expected " + std::to_string(dim));

  if (params.kind == SvmKind::TWO_CLASS) {
    bool has_adl = false, has_fall = false;
    for (const LabeledFeature& f : data)
      (f.label == Label::ADL ? has_adl : has_fall) = true;
    if (!has_adl || !has_fall)
      raise_data("MissingClass", "two-class SVM needs both labels");
    if (!(params.c > 0)) raise_usage("BadC", "C must be positive");
  } else {
    for (const LabeledFeature& f : data)
      if (f.label != Label::ADL)
        raise_data("ContainsFall",
                   "one-class training set contains '" + f.id + "'");
    if (!(params.nu > 0.0 && params.nu <= 1.0))
      raise_usage("BadNu", "nu must be in (0, 1]");
  }

  KernelSpec kernel = params.kernel;
  if (kernel.type == KernelSpec::RBF && kernel.gamma <= 0.0)
    kernel.gamma = 1.0 / static_cast<double>(std::max<std::size_t>(1, dim));

  const std::size_t n = data.size();
  std::size_t max_iter = params.max_iter;
  if (max_iter == 0) max_iter = std::max<std::size_t>(200 * n, 100000);

  KernelCache cache(data, kernel, kernel.gamma);

  SolveResult sol;
  if (params.kind == SvmKind::TWO_CLASS) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
      y[i] = data[i].label == Label::FALL ? 1.0 : -1.0;
    sol = solve_two_class(data, y, cache, params.c, params.eps, params.gap_tol,
                          max_iter);
    SvmModel m;
    m.kind = params.kind;
    m.kernel = kernel;
    m.c = params.c;
    m.nu = params.nu;
    m.dim = dim;
    m.bias = -sol.rho;
    m.iterations = sol.iterations;
    m.duality_gap = sol.rel_gap;
    for (std::size_t i = 0; i < n; ++i) {
      if (sol.alpha[i] > 0.0) {
        m.sv.push_back(data[i].values);
        m.coef.push_back(y[i] * sol.alpha[i]);
      }
    }
    return m;
  }

  sol = solve_one_class(data, cache, params.nu, params.eps, params.gap_tol,
                        max_iter);
  SvmModel m;
  m.kind = params.kind;
  m.kernel = kernel;
  m.c = params.c;
  m.nu = params.nu;
  m.dim = dim;
  m.bias = -sol.rho;
  m.iterations = sol.iterations;
  m.duality_gap = sol.rel_gap;
  for (std::size_t i = 0; i < n; ++i) {
    if (sol.alpha[i] > 0.0) {
      m.sv.push_back(data[i].values);
      m.coef.push_back(sol.alpha[i]);
    }
  }
  return m;
}

double svm_decision(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.dim)
    raise_data("DimensionMismatch",
               "query has dimension " + std::to_string(x.size()) + ", model has " +
                   std::to_string(model.dim));
  double f = model.bias;
  for (std::size_t i = 0; i < model.sv.size(); ++i)
    f += model.coef[i] * kernel_eval(model.kernel, model.kernel.gamma,
                                     model.sv[i], x);
  return f;
}

Label svm_predict(const SvmModel& model, std::span<const double> x) {
  const double f = svm_decision(model, x);
  if (model.kind == SvmKind::TWO_CLASS) return f > 0.0 ? Label::FALL : Label::ADL;
  return f < 0.0 ? Label::FALL : Label::ADL;
}

std::vector<Label> svm_predict_batch(const SvmModel& model,
                                     std::span<const LabeledFeature> queries) {
  std::vector<Label> out(queries.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(queries.size()); ++i)
    out[i] = svm_predict(model, queries[i].values);
  return out;
}

}  // namespace falldet
