#include "deconf/embedding.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "deconf/error.hpp"
#include "deconf/rng.hpp"

namespace deconf {

std::string embed_method_name(EmbedMethod m) {
  switch (m) {
    case EmbedMethod::pca: return "pca";
    case EmbedMethod::ruv: return "ruv";
    case EmbedMethod::external: return "external";
  }
  return "unknown";
}

Eigen::MatrixXd apply_preprocessing(const Eigen::MatrixXd& m,
                                    const std::vector<PreprocessStep>& steps) {
  Eigen::MatrixXd out = m;
  for (const auto& step : steps) {
    switch (step.op) {
      case PreprocessStep::Op::library_size_normalize: {
        if (step.target_total <= 0.0) {
          throw ValidationError("library_size_normalize: target_total must be > 0");
        }
        for (Eigen::Index r = 0; r < out.rows(); ++r) {
          const double total = out.row(r).sum();
          if (total > 0.0) out.row(r) *= step.target_total / total;
        }
        break;
      }
      case PreprocessStep::Op::log1p:
        for (Eigen::Index c = 0; c < out.cols(); ++c) {
          for (Eigen::Index r = 0; r < out.rows(); ++r) {
            if (out(r, c) <= -1.0) {
              throw ValidationError("log1p: entry <= -1 at (" +
                                    std::to_string(r + 1) + "," +
                                    std::to_string(c + 1) + ")");
            }
            out(r, c) = std::log1p(out(r, c));
          }
        }
        break;
      case PreprocessStep::Op::center:
        out = column_standardize(out, StandardizeMode::center).first;
        break;
      case PreprocessStep::Op::scale: {
        const double n = static_cast<double>(out.rows());
        for (Eigen::Index c = 0; c < out.cols(); ++c) {
          const double mean = out.col(c).mean();
          const double ss = (out.col(c).array() - mean).square().sum();
          const double sd = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
          if (sd > 0.0) out.col(c) /= sd;
        }
        break;
      }
    }
  }
  return out;
}

namespace {

// PCA core shared by pca_embed and ruv_embed: center on the first fit_rows
// rows, take the SVD there, score all rows against the fitted loadings.
EmbeddingResult pca_core(const Eigen::MatrixXd& mat, int rank, int fit_rows,
                         EmbedMethod method, const EmbedConfig& cfg) {
  const Eigen::Index n = mat.rows();
  const Eigen::Index pc = mat.cols();
  if (rank < 1) throw ValidationError("embedding: rank must be >= 1");
  if (rank > std::min<Eigen::Index>(fit_rows, pc)) {
    throw NumericError("embedding: rank " + std::to_string(rank) +
                       " exceeds min(n, |C|) = " +
                       std::to_string(std::min<Eigen::Index>(fit_rows, pc)));
  }

  const Eigen::MatrixXd fit_block = mat.topRows(fit_rows);
  const Eigen::RowVectorXd means = fit_block.colwise().mean();
  Eigen::MatrixXd centered = fit_block.rowwise() - means;

  const double input_norm = fit_block.norm();
  if (centered.norm() <= 1e-12 * (1.0 + input_norm)) {
    throw NumericError("embedding: zero matrix after preprocessing");
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd loadings = svd.matrixV().leftCols(rank);

  // deterministic sign convention: largest-magnitude loading entry >= 0
  for (Eigen::Index c = 0; c < loadings.cols(); ++c) {
    Eigen::Index argmax = 0;
    double maxabs = -1.0;
    for (Eigen::Index r = 0; r < loadings.rows(); ++r) {
      const double a = std::abs(loadings(r, c));
      if (a > maxabs) {
        maxabs = a;
        argmax = r;
      }
    }
    if (loadings(argmax, c) < 0.0) loadings.col(c) = -loadings.col(c);
  }

  EmbeddingResult res;
  res.u_hat = (mat.rowwise() - means) * loadings;
  res.loadings = std::move(loadings);
  res.method = method;
  res.config = cfg;
  res.config.rank = rank;
  res.fit_rows = fit_rows;
  (void)n;
  return res;
}

int resolve_fit_rows(int n, double split_fraction) {
  if (split_fraction < 0.0 || split_fraction >= 1.0) {
    throw ValidationError("embedding: split_fraction must lie in [0, 1)");
  }
  if (split_fraction == 0.0) return n;
  const int m = static_cast<int>(
      std::ceil(split_fraction * static_cast<double>(n)));
  return std::max(2, std::min(m, n));
}

}  // namespace

EmbeddingResult pca_embed(const Dataset& ds, const EmbedConfig& cfg) {
  if (cfg.method != EmbedMethod::pca) {
    throw ValidationError("pca_embed: config method is not pca");
  }
  if (ds.control_idx.empty()) {
    throw ValidationError("pca_embed: dataset has no control outcomes");
  }
  const Eigen::MatrixXd yc = apply_preprocessing(ds.y_controls(), cfg.preprocessing);
  const int fit_rows = resolve_fit_rows(ds.n(), cfg.split_fraction);
  return pca_core(yc, cfg.rank, fit_rows, EmbedMethod::pca, cfg);
}

EmbeddingResult ruv_embed(const Dataset& ds, const EmbedConfig& cfg) {
  if (cfg.method != EmbedMethod::ruv) {
    throw ValidationError("ruv_embed: config method is not ruv");
  }
  if (ds.control_idx.empty()) {
    throw ValidationError("ruv_embed: dataset has no control outcomes");
  }
  const int n = ds.n();
  const int d = ds.d();
  if (cfg.rank > std::min<int>(n - d - 1, static_cast<int>(ds.control_idx.size()))) {
    throw NumericError("ruv_embed: rank exceeds min(n - d - 1, |C|)");
  }
  Eigen::MatrixXd design(n, d + 1);
  design.col(0).setOnes();
  design.rightCols(d) = ds.x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < design.cols()) {
    throw NumericError("ruv_embed: [1, X] is rank deficient");
  }
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(design).householderQ() *
      Eigen::MatrixXd::Identity(n, d + 1);

  Eigen::MatrixXd yc = apply_preprocessing(ds.y_controls(), cfg.preprocessing);
  const double input_norm = yc.norm();
  yc -= q * (q.transpose() * yc);
  if (yc.norm() <= 1e-10 * (1.0 + input_norm)) {
    throw NumericError("ruv_embed: zero matrix after preprocessing");
  }
  const int fit_rows = resolve_fit_rows(n, cfg.split_fraction);
  return pca_core(yc, cfg.rank, fit_rows, EmbedMethod::ruv, cfg);
}

namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& m, const char* name) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> piv(m);
  if (piv.rank() < m.cols()) {
    throw NumericError(std::string("projection_gap: rank-deficient input (") +
                       name + ")");
  }
  return Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ() *
         Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

// ||P_u - P_v|| via power iteration on the squared operator, projectors never
// materialized.  Used for n beyond the explicit-SVD cutoff.
double gap_power_iteration(const Eigen::MatrixXd& qu, const Eigen::MatrixXd& qv) {
  const Eigen::Index n = qu.rows();
  rng::Stream stream(rng::derive(0x70726F6A67617000ULL, static_cast<std::uint64_t>(n)));
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = stream.normal();
  v.normalize();
  const auto apply = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    return qu * (qu.transpose() * w) - qv * (qv.transpose() * w);
  };
  double lambda = 0.0;
  for (int iter = 0; iter < 1000; ++iter) {
    Eigen::VectorXd w = apply(apply(v));
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double next = std::sqrt(norm);
    if (iter > 0 && std::abs(next - lambda) <= 1e-10 * std::max(1.0, next)) {
      return next;
    }
    lambda = next;
    v = std::move(w);
  }
  return lambda;
}

}  // namespace

double projection_gap(const Eigen::MatrixXd& u_true, const Eigen::MatrixXd& u_est) {
  if (u_true.rows() != u_est.rows()) {
    throw ValidationError("projection_gap: row counts differ");
  }
  const Eigen::MatrixXd qt = orthonormal_basis(u_true, "u_true");
  const Eigen::MatrixXd qe = orthonormal_basis(u_est, "u_est");
  const Eigen::Index n = qt.rows();
  double gap;
  if (n <= 4000) {
    Eigen::MatrixXd diff = qt * qt.transpose() - qe * qe.transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(diff);
    gap = svd.singularValues()[0];
  } else {
    gap = gap_power_iteration(qt, qe);
  }
  return std::clamp(gap, 0.0, 1.0);
}

}  // namespace deconf
