#include "deconf/learners.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "deconf/error.hpp"
#include "deconf/kernels.hpp"
#include "deconf/rng.hpp"

namespace deconf {

std::string learner_kind_name(LearnerKind k) {
  switch (k) {
    case LearnerKind::ols: return "ols";
    case LearnerKind::ridge: return "ridge";
    case LearnerKind::knn: return "knn";
    case LearnerKind::random_forest: return "random_forest";
    case LearnerKind::zero: return "zero";
  }
  return "unknown";
}

CrossFitPlan CrossFitPlan::kfold(int n, int folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("crossfit: n_folds must be >= 2");
  if (n < folds) throw ValidationError("crossfit: more folds than rows");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  rng::Stream stream(rng::derive(seed, 0x666F6C64u));
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(stream.uniform_int(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  CrossFitPlan plan;
  plan.n_folds = folds;
  plan.seed = seed;
  plan.fold_assignment.assign(static_cast<std::size_t>(n), 0);
  for (int pos = 0; pos < n; ++pos) {
    const int fold = static_cast<int>(
        (static_cast<long long>(pos) * folds) / n);
    plan.fold_assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos)])] = fold;
  }
  return plan;
}

CrossFitPlan CrossFitPlan::insample(int n) {
  CrossFitPlan plan;
  plan.n_folds = 1;
  plan.fold_assignment.assign(static_cast<std::size_t>(n), 0);
  return plan;
}

void CrossFitPlan::validate() const {
  if (n_folds < 1) throw ValidationError("crossfit: invalid fold count");
  std::vector<int> sizes(static_cast<std::size_t>(n_folds), 0);
  for (int f : fold_assignment) {
    if (f < 0 || f >= n_folds) throw ValidationError("crossfit: fold id out of range");
    ++sizes[static_cast<std::size_t>(f)];
  }
  for (int s : sizes) {
    if (s == 0) throw ValidationError("crossfit: empty fold");
  }
}

namespace {

class LinearModel : public FitModel {
 public:
  LinearModel(Eigen::MatrixXd coef) : coef_(std::move(coef)) {}
  Eigen::MatrixXd predict(const Eigen::MatrixXd& features) const override {
    if (features.cols() + 1 != coef_.rows()) {
      throw ValidationError("linear predict: feature count mismatch");
    }
    Eigen::MatrixXd out = features * coef_.bottomRows(features.cols());
    out.rowwise() += coef_.row(0);
    return out;
  }

 private:
  Eigen::MatrixXd coef_;  // (1+q) x s, intercept first
};

class ZeroModel : public FitModel {
 public:
  ZeroModel(Eigen::Index q, Eigen::Index s) : q_(q), s_(s) {}
  Eigen::MatrixXd predict(const Eigen::MatrixXd& features) const override {
    if (features.cols() != q_) throw ValidationError("zero predict: feature mismatch");
    return Eigen::MatrixXd::Zero(features.rows(), s_);
  }

 private:
  Eigen::Index q_;
  Eigen::Index s_;
};

class KnnModel : public FitModel {
 public:
  KnnModel(Eigen::MatrixXd features, Eigen::MatrixXd targets, int k)
      : targets_(std::move(targets)), k_(k) {
    n_ = features.rows();
    q_ = features.cols();
    // row-major copy so distance kernels stream each training row
    rows_.resize(static_cast<std::size_t>(n_ * q_));
    for (Eigen::Index i = 0; i < n_; ++i) {
      for (Eigen::Index f = 0; f < q_; ++f) {
        rows_[static_cast<std::size_t>(i * q_ + f)] = features(i, f);
      }
    }
  }

  Eigen::MatrixXd predict(const Eigen::MatrixXd& features) const override {
    if (features.cols() != q_) throw ValidationError("knn predict: feature mismatch");
    Eigen::MatrixXd out(features.rows(), targets_.cols());
    std::vector<double> probe(static_cast<std::size_t>(q_));
    std::vector<std::pair<double, int>> cand(static_cast<std::size_t>(n_));
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      for (Eigen::Index f = 0; f < q_; ++f) probe[static_cast<std::size_t>(f)] = features(i, f);
      for (Eigen::Index t = 0; t < n_; ++t) {
        cand[static_cast<std::size_t>(t)] = {
            kern::sq_dist(probe.data(), rows_.data() + t * q_,
                          static_cast<std::size_t>(q_)),
            static_cast<int>(t)};
      }
      // distance ties broken by row index
      std::partial_sort(cand.begin(), cand.begin() + k_, cand.end());
      for (Eigen::Index c = 0; c < targets_.cols(); ++c) {
        double acc = 0.0;
        const double first = targets_(cand[0].second, c);
        bool all_equal = true;
        for (int j = 0; j < k_; ++j) {
          const double v = targets_(cand[static_cast<std::size_t>(j)].second, c);
          acc += v;
          all_equal = all_equal && v == first;
        }
        out(i, c) = all_equal ? first : acc / static_cast<double>(k_);
      }
    }
    return out;
  }

 private:
  Eigen::MatrixXd targets_;
  std::vector<double> rows_;
  Eigen::Index n_ = 0;
  Eigen::Index q_ = 0;
  int k_;
};

class ForestMultiModel : public FitModel {
 public:
  ForestMultiModel(std::vector<ForestModel> forests) : forests_(std::move(forests)) {}
  Eigen::MatrixXd predict(const Eigen::MatrixXd& features) const override {
    Eigen::MatrixXd out(features.rows(), static_cast<Eigen::Index>(forests_.size()));
    for (std::size_t c = 0; c < forests_.size(); ++c) {
      out.col(static_cast<Eigen::Index>(c)) = forests_[c].predict(features);
    }
    return out;
  }

 private:
  std::vector<ForestModel> forests_;
};

Eigen::MatrixXd solve_linear(const Eigen::MatrixXd& features,
                             const Eigen::MatrixXd& targets, double lambda) {
  const Eigen::Index n = features.rows();
  const Eigen::Index q = features.cols();
  Eigen::MatrixXd design(n, q + 1);
  design.col(0).setOnes();
  design.rightCols(q) = features;
  Eigen::MatrixXd gram = design.transpose() * design;
  Eigen::MatrixXd rhs = design.transpose() * targets;

  const double feature_trace = gram.diagonal().tail(q).sum();
  double ridge = lambda;
  if (ridge == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double emax = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double emin = eig.eigenvalues().minCoeff();
    if (!(emin > 1e-12 * std::max(emax, 1e-300))) {
      // numerically singular design
      ridge = 1e-10 * feature_trace / std::max<Eigen::Index>(q, 1);
      if (ridge <= 0.0) ridge = 1e-10;
    }
  }
  if (ridge > 0.0) {
    for (Eigen::Index j = 1; j <= q; ++j) gram(j, j) += ridge;
  }
  return gram.ldlt().solve(rhs);
}

}  // namespace

std::unique_ptr<FitModel> fit_learner(const Eigen::MatrixXd& features,
                                      const Eigen::MatrixXd& targets,
                                      const LearnerSpec& spec) {
  if (features.rows() != targets.rows()) {
    throw ValidationError("fit_learner: row count mismatch");
  }
  if (features.rows() < 2 && spec.kind != LearnerKind::zero) {
    throw ValidationError("fit_learner: fold too small for learner");
  }
  switch (spec.kind) {
    case LearnerKind::zero:
      return std::make_unique<ZeroModel>(features.cols(), targets.cols());
    case LearnerKind::ols:
      return std::make_unique<LinearModel>(solve_linear(features, targets, 0.0));
    case LearnerKind::ridge:
      if (spec.lambda < 0.0) throw ValidationError("ridge: lambda must be >= 0");
      return std::make_unique<LinearModel>(
          solve_linear(features, targets, spec.lambda));
    case LearnerKind::knn:
      if (spec.k < 1) throw ValidationError("knn: k must be >= 1");
      if (spec.k > features.rows()) {
        throw ValidationError("knn: fold too small for learner (k > training rows)");
      }
      return std::make_unique<KnnModel>(features, targets, spec.k);
    case LearnerKind::random_forest: {
      std::vector<ForestModel> forests;
      forests.reserve(static_cast<std::size_t>(targets.cols()));
      for (Eigen::Index c = 0; c < targets.cols(); ++c) {
        forests.push_back(rf_fit(features, targets.col(c), spec.forest,
                                 rng::derive(spec.seed, 0x74676574u,
                                             static_cast<std::uint64_t>(c))));
      }
      return std::make_unique<ForestMultiModel>(std::move(forests));
    }
  }
  throw ValidationError("fit_learner: unknown learner kind");
}

Eigen::MatrixXd fit_predict_crossfit(const Eigen::MatrixXd& features,
                                     const Eigen::MatrixXd& targets,
                                     const LearnerSpec& spec,
                                     const CrossFitPlan& plan) {
  plan.validate();
  const int n = static_cast<int>(features.rows());
  if (plan.n_rows() != n || targets.rows() != n) {
    throw ValidationError("crossfit: plan does not cover all rows");
  }
  if (plan.n_folds == 1) {
    auto model = fit_learner(features, targets, spec);
    return model->predict(features);
  }

  Eigen::MatrixXd out(n, targets.cols());
  for (int fold = 0; fold < plan.n_folds; ++fold) {
    std::vector<int> train;
    std::vector<int> eval;
    train.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      (plan.fold_assignment[static_cast<std::size_t>(i)] == fold ? eval : train)
          .push_back(i);
    }
    Eigen::MatrixXd ftr(static_cast<Eigen::Index>(train.size()), features.cols());
    Eigen::MatrixXd ttr(static_cast<Eigen::Index>(train.size()), targets.cols());
    for (std::size_t i = 0; i < train.size(); ++i) {
      ftr.row(static_cast<Eigen::Index>(i)) = features.row(train[i]);
      ttr.row(static_cast<Eigen::Index>(i)) = targets.row(train[i]);
    }
    LearnerSpec fold_spec = spec;
    fold_spec.seed = rng::derive(spec.seed, 0x666Fu, static_cast<std::uint64_t>(fold));
    auto model = fit_learner(ftr, ttr, fold_spec);
    Eigen::MatrixXd fev(static_cast<Eigen::Index>(eval.size()), features.cols());
    for (std::size_t i = 0; i < eval.size(); ++i) {
      fev.row(static_cast<Eigen::Index>(i)) = features.row(eval[i]);
    }
    const Eigen::MatrixXd pred = model->predict(fev);
    for (std::size_t i = 0; i < eval.size(); ++i) {
      out.row(eval[i]) = pred.row(static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

LearnerSpec grid_select(const Eigen::MatrixXd& features,
                        const Eigen::MatrixXd& targets,
                        const std::vector<LearnerSpec>& grid,
                        const CrossFitPlan& plan,
                        std::vector<GridCellResult>* report) {
  if (grid.empty()) throw ValidationError("grid_select: empty grid");
  std::vector<GridCellResult> local(grid.size());
  int best = -1;
  double best_mse = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    try {
      const Eigen::MatrixXd pred = fit_predict_crossfit(features, targets, grid[g], plan);
      double mse = 0.0;
      for (Eigen::Index c = 0; c < targets.cols(); ++c) {
        mse += (pred.col(c) - targets.col(c)).squaredNorm() /
               static_cast<double>(targets.rows());
      }
      mse /= static_cast<double>(targets.cols());
      local[g].cv_mse = mse;
      if (best < 0 || mse < best_mse) {
        best = static_cast<int>(g);
        best_mse = mse;
      }
    } catch (const std::exception& e) {
      local[g].failed = true;
      local[g].error = e.what();
    }
  }
  if (report != nullptr) *report = std::move(local);
  if (best < 0) throw NumericError("grid_select: every grid cell failed");
  return grid[static_cast<std::size_t>(best)];
}

}  // namespace deconf
