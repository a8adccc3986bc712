#include "panda/datagen.hpp"

#include <cmath>

namespace panda {

namespace {

constexpr std::uint64_t kStreamClass0 = 0;
constexpr std::uint64_t kStreamClass1 = 1;

Matrix toeplitz_decay(int p, double base) {
  Matrix m(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) m(i, j) = std::pow(base, std::abs(i - j));
  }
  return m;
}

Matrix invert_spd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw ConstructionError("precision matrix is not positive definite");
  }
  Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  return 0.5 * (inv + inv.transpose());
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

Vector front_support(int p, int s, double value) {
  Vector beta = Vector::Zero(p);
  beta.head(s).setConstant(value);
  return beta;
}

Matrix erdos_renyi_precision(int p, Rng& rng) {
  Matrix raw(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      const bool edge = rng.bernoulli(0.2);
      double weight = rng.uniform(0.5, 1.0);
      if (rng.bernoulli(0.5)) weight = -weight;
      raw(i, j) = edge ? weight : 0.0;
    }
  }
  Matrix sym = 0.5 * (raw + raw.transpose());
  const double shift = std::max(-min_eigenvalue(sym), 0.0) + 0.05;
  Matrix shifted = sym + shift * Matrix::Identity(p, p);
  Vector inv_sqrt_diag = shifted.diagonal().cwiseSqrt().cwiseInverse();
  return inv_sqrt_diag.asDiagonal() * shifted * inv_sqrt_diag.asDiagonal();
}

Matrix block_sparse_precision(int p, Rng& rng) {
  Matrix b = Matrix::Zero(p, p);
  const int half = p / 2;
  for (int j = 0; j < p; ++j) {
    for (int k = j + 1; k < p; ++k) {
      double value;
      if (j < half) {
        value = rng.bernoulli(0.5) ? 10.0 : 0.0;
      } else {
        value = 10.0;  // dense lower-right block
      }
      b(j, k) = b(k, j) = value;
    }
  }
  b.diagonal().setOnes();
  const double w = std::max(-min_eigenvalue(b), 0.0) + 0.05;
  return (b + w * Matrix::Identity(p, p)) / (1.0 + w);
}

}  // namespace

std::string to_string(SimModel model) {
  switch (model) {
    case SimModel::AR1: return "ar1";
    case SimModel::VaryingDiagonal: return "varying_diagonal";
    case SimModel::ErdosRenyi: return "erdos_renyi";
    case SimModel::BlockSparse: return "block_sparse";
    case SimModel::ApproxSparse: return "approx_sparse";
  }
  return "unknown";
}

SimModel sim_model_from_string(const std::string& name) {
  if (name == "ar1") return SimModel::AR1;
  if (name == "varying_diagonal") return SimModel::VaryingDiagonal;
  if (name == "erdos_renyi") return SimModel::ErdosRenyi;
  if (name == "block_sparse") return SimModel::BlockSparse;
  if (name == "approx_sparse") return SimModel::ApproxSparse;
  throw InvalidInput("unknown model name: " + name);
}

GaussianModel build_model(const SimSpec& spec) {
  if (spec.p < 2) throw InvalidInput("p must be at least 2");
  const bool needs_support = spec.model != SimModel::ApproxSparse;
  if (needs_support && (spec.s < 1 || spec.s > spec.p)) {
    throw InvalidInput("support size must satisfy 1 <= s <= p");
  }

  const int p = spec.p;
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(spec.model)));

  Matrix sigma;
  Vector beta;
  switch (spec.model) {
    case SimModel::AR1: {
      sigma = invert_spd(toeplitz_decay(p, 0.9));
      beta = front_support(p, spec.s, 2.0 / std::sqrt(spec.s));
      break;
    }
    case SimModel::VaryingDiagonal: {
      sigma = toeplitz_decay(p, 0.9);
      for (int j = 0; j < p; ++j) {
        sigma(j, j) = j < 5 ? 11.0 : 1.0 + rng.uniform();
      }
      beta = front_support(p, spec.s, 1.0 / std::sqrt(spec.s));
      break;
    }
    case SimModel::ErdosRenyi: {
      sigma = invert_spd(erdos_renyi_precision(p, rng));
      beta = front_support(p, spec.s, 1.0 / std::sqrt(spec.s));
      break;
    }
    case SimModel::BlockSparse: {
      sigma = invert_spd(block_sparse_precision(p, rng));
      beta = front_support(p, spec.s, 0.5 / std::sqrt(spec.s));
      break;
    }
    case SimModel::ApproxSparse: {
      sigma = toeplitz_decay(p, 0.9);
      beta = Vector(p);
      for (int j = 0; j < p; ++j) beta(j) = std::pow(0.75, j + 1);
      break;
    }
  }
  beta *= spec.eta_scale;

  if (min_eigenvalue(sigma) <= 1e-10) {
    throw ConstructionError("constructed covariance is not positive definite");
  }

  const Vector mu_d = sigma * beta;
  return GaussianModel::with_known_direction(-0.5 * mu_d, 0.5 * mu_d,
                                             std::move(sigma), std::move(beta));
}

Matrix sample_class(const GaussianModel& model,
                    const Eigen::Ref<const Vector>& mean, Eigen::Index n,
                    std::uint64_t seed) {
  if (n < 1) throw InvalidInput("need at least one sample");
  const Eigen::Index p = model.p();
  Eigen::LLT<Matrix> llt(model.sigma());
  const Matrix chol = llt.matrixL();

  Rng rng(seed);
  Matrix samples(n, p);
  Vector z(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
    samples.row(i) = (mean + chol * z).transpose();
  }
  return samples;
}

std::pair<Matrix, Matrix> sample(const GaussianModel& model, Eigen::Index n0,
                                 Eigen::Index n1, std::uint64_t seed) {
  return {sample_class(model, model.mu0(), n0, derive_seed(seed, kStreamClass0)),
          sample_class(model, model.mu1(), n1, derive_seed(seed, kStreamClass1))};
}

std::vector<Vector> kclass_means(const GaussianModel& model,
                                 const SimSpec& spec, int num_classes) {
  if (num_classes < 2) throw InvalidInput("need at least 2 classes");
  if (spec.model == SimModel::ApproxSparse) {
    throw InvalidInput("K-class means need a sparse-support recipe");
  }
  if ((num_classes - 1) * spec.s > spec.p) {
    throw InvalidInput("(K-1) s exceeds p; classes would overlap");
  }

  const Vector& base = model.beta_star();
  std::vector<Vector> means(num_classes);
  means[0] = Vector::Zero(spec.p);
  for (int k = 1; k < num_classes; ++k) {
    Vector direction = Vector::Zero(spec.p);
    direction.segment((k - 1) * spec.s, spec.s) = base.head(spec.s);
    means[k] = model.sigma() * direction;
  }
  return means;
}

}  // namespace panda
