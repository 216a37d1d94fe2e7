#include "deconf/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "deconf/error.hpp"
#include "deconf/kernels.hpp"
#include "deconf/rng.hpp"

namespace deconf {

double ForestModel::predict_row(const double* x) const {
  double acc = 0.0;
  for (const auto& tree : trees) {
    int node = 0;
    while (tree[node].feature >= 0) {
      node = x[tree[node].feature] <= tree[node].threshold ? tree[node].left
                                                           : tree[node].right;
    }
    acc += tree[node].value;
  }
  return acc / static_cast<double>(trees.size());
}

Eigen::VectorXd ForestModel::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != n_features) {
    throw ValidationError("forest predict: feature count mismatch");
  }
  Eigen::VectorXd out(x.rows());
  std::vector<double> row(static_cast<std::size_t>(n_features));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (int f = 0; f < n_features; ++f) row[static_cast<std::size_t>(f)] = x(i, f);
    out[i] = predict_row(row.data());
  }
  return out;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Segment {
  int lo;
  int hi;
  int depth;
  int node;
};

struct TreeBuilder {
  const Eigen::MatrixXd& x;
  const Eigen::VectorXd& y;
  const ForestParams& params;
  int q;
  int m_try;
  int max_depth;

  // per-feature row indices, each sorted by that feature within node segments
  std::vector<std::vector<int>> idx;
  std::vector<int> scratch;
  std::vector<double> prefix;
  std::vector<double> penalty;
  std::vector<int> feature_pool;

  std::vector<TreeNode> build(rng::Stream& stream, int n_rows);
};

std::vector<TreeNode> TreeBuilder::build(rng::Stream& stream, int n_rows) {
  std::vector<TreeNode> tree;
  tree.emplace_back();
  std::vector<Segment> stack;
  stack.push_back({0, n_rows, 0, 0});

  while (!stack.empty()) {
    const Segment seg = stack.back();
    stack.pop_back();
    const int s = seg.hi - seg.lo;
    const int* rows0 = idx[0].data() + seg.lo;

    double ysum = 0.0;
    double ymin = y[rows0[0]];
    double ymax = ymin;
    for (int i = 0; i < s; ++i) {
      const double v = y[rows0[i]];
      ysum += v;
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }

    TreeNode& node = tree[static_cast<std::size_t>(seg.node)];
    const bool depth_stop = max_depth >= 0 && seg.depth >= max_depth;
    if (depth_stop || s < 2 * params.min_leaf || ymin == ymax) {
      node.feature = -1;
      node.value = ymin == ymax
                       ? ymin
                       : std::clamp(ysum / static_cast<double>(s), ymin, ymax);
      continue;
    }

    // draw m_try distinct features
    std::iota(feature_pool.begin(), feature_pool.end(), 0);
    int best_feature = -1;
    std::ptrdiff_t best_pos = -1;
    double best_score = kNegInf;
    for (int t = 0; t < m_try; ++t) {
      const int pick =
          t + static_cast<int>(stream.uniform_int(static_cast<std::uint64_t>(q - t)));
      std::swap(feature_pool[t], feature_pool[pick]);
      const int f = feature_pool[t];
      const int* rows = idx[static_cast<std::size_t>(f)].data() + seg.lo;

      prefix[0] = 0.0;
      penalty[0] = kNegInf;
      for (int i = 0; i < s; ++i) {
        prefix[static_cast<std::size_t>(i) + 1] =
            prefix[static_cast<std::size_t>(i)] + y[rows[i]];
        if (i > 0) {
          penalty[static_cast<std::size_t>(i)] =
              x(rows[i - 1], f) < x(rows[i], f) ? 0.0 : kNegInf;
        }
      }
      penalty[static_cast<std::size_t>(s)] = kNegInf;

      const kern::SplitResult cand =
          kern::best_split(prefix.data(), penalty.data(),
                           static_cast<std::size_t>(s),
                           static_cast<std::size_t>(params.min_leaf));
      if (cand.index >= 0 && cand.score > best_score) {
        best_score = cand.score;
        best_feature = f;
        best_pos = cand.index;
      }
    }

    const double parent_score = ysum * ysum / static_cast<double>(s);
    if (best_feature < 0 || !(best_score > parent_score)) {
      node.feature = -1;
      node.value = std::clamp(ysum / static_cast<double>(s), ymin, ymax);
      continue;
    }

    const int* brows = idx[static_cast<std::size_t>(best_feature)].data() + seg.lo;
    const double x_left = x(brows[best_pos - 1], best_feature);
    const double x_right = x(brows[best_pos], best_feature);
    double thr = x_left + (x_right - x_left) / 2.0;
    if (!(thr < x_right)) thr = x_left;  // keep the scanned partition exact

    // stable partition of every feature's segment by the split predicate
    for (int f = 0; f < q; ++f) {
      int* rows = idx[static_cast<std::size_t>(f)].data() + seg.lo;
      int nl = 0;
      int nr = 0;
      for (int i = 0; i < s; ++i) {
        const int r = rows[i];
        if (x(r, best_feature) <= thr) {
          rows[nl++] = r;
        } else {
          scratch[static_cast<std::size_t>(nr++)] = r;
        }
      }
      std::copy(scratch.begin(), scratch.begin() + nr, rows + nl);
    }

    const int left_id = static_cast<int>(tree.size());
    tree.emplace_back();
    const int right_id = static_cast<int>(tree.size());
    tree.emplace_back();
    TreeNode& nd = tree[static_cast<std::size_t>(seg.node)];
    nd.feature = best_feature;
    nd.threshold = thr;
    nd.left = left_id;
    nd.right = right_id;
    const int mid = seg.lo + static_cast<int>(best_pos);
    stack.push_back({mid, seg.hi, seg.depth + 1, right_id});
    stack.push_back({seg.lo, mid, seg.depth + 1, left_id});
  }
  return tree;
}

}  // namespace

ForestModel rf_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& target,
                   const ForestParams& params, std::uint64_t seed) {
  const int n = static_cast<int>(features.rows());
  const int q = static_cast<int>(features.cols());
  if (n != target.size()) throw ValidationError("rf_fit: row count mismatch");
  if (params.min_leaf < 1) throw ValidationError("rf_fit: min_leaf must be >= 1");
  if (params.n_trees < 1) throw ValidationError("rf_fit: n_trees must be >= 1");
  if (!(params.max_samples > 0.0 && params.max_samples <= 1.0)) {
    throw ValidationError("rf_fit: max_samples must lie in (0, 1]");
  }
  if (n < 2 * params.min_leaf && n < 2) {
    throw ValidationError("rf_fit: too few rows");
  }

  const int n_sub = std::max(
      1, static_cast<int>(std::ceil(params.max_samples * static_cast<double>(n))));
  int m_try = params.m_try_all ? q : params.m_try;
  if (m_try <= 0) m_try = (q + 2) / 3;
  m_try = std::min(m_try, q);

  // forest-level presort of each feature, ties kept in row order
  std::vector<std::vector<int>> order(static_cast<std::size_t>(q));
  for (int f = 0; f < q; ++f) {
    auto& ord = order[static_cast<std::size_t>(f)];
    ord.resize(static_cast<std::size_t>(n));
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(),
                     [&](int a, int b) { return features(a, f) < features(b, f); });
  }

  ForestModel model;
  model.n_features = q;
  model.params = params;
  model.trees.resize(static_cast<std::size_t>(params.n_trees));

  TreeBuilder builder{features, target, params, q, m_try,
                      params.max_depth,  {},       {},     {}, {}, {}};
  builder.idx.assign(static_cast<std::size_t>(q), {});
  for (auto& v : builder.idx) v.resize(static_cast<std::size_t>(n_sub));
  builder.scratch.resize(static_cast<std::size_t>(n_sub));
  builder.prefix.resize(static_cast<std::size_t>(n_sub) + 1);
  builder.penalty.resize(static_cast<std::size_t>(n_sub) + 1);
  builder.feature_pool.resize(static_cast<std::size_t>(q));

  std::vector<int> counts(static_cast<std::size_t>(n));
  std::vector<int> pick(static_cast<std::size_t>(n));
  for (int t = 0; t < params.n_trees; ++t) {
    rng::Stream stream(rng::derive(seed, 0x7472u, static_cast<std::uint64_t>(t)));
    std::fill(counts.begin(), counts.end(), 0);
    if (params.bootstrap) {
      for (int k = 0; k < n_sub; ++k) {
        ++counts[stream.uniform_int(static_cast<std::uint64_t>(n))];
      }
    } else {
      std::iota(pick.begin(), pick.end(), 0);
      for (int k = 0; k < n_sub; ++k) {
        const int j =
            k + static_cast<int>(stream.uniform_int(static_cast<std::uint64_t>(n - k)));
        std::swap(pick[static_cast<std::size_t>(k)], pick[static_cast<std::size_t>(j)]);
        ++counts[pick[static_cast<std::size_t>(k)]];
      }
    }
    for (int f = 0; f < q; ++f) {
      auto& dst = builder.idx[static_cast<std::size_t>(f)];
      int pos = 0;
      for (int r : order[static_cast<std::size_t>(f)]) {
        for (int c = 0; c < counts[static_cast<std::size_t>(r)]; ++c) dst[pos++] = r;
      }
    }
    model.trees[static_cast<std::size_t>(t)] = builder.build(stream, n_sub);
  }
  return model;
}

}  // namespace deconf
