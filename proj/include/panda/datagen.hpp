#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panda/model.hpp"
#include "panda/rng.hpp"

namespace panda {

enum class SimModel {
  AR1,
  VaryingDiagonal,
  ErdosRenyi,
  BlockSparse,
  ApproxSparse,
};

std::string to_string(SimModel model);
SimModel sim_model_from_string(const std::string& name);

//! One synthetic population cell: which covariance recipe, the dimension,
//! the support size s (ignored by ApproxSparse), a scale factor on the true
//! direction, and the seed driving any randomness in the recipe.
struct SimSpec {
  SimModel model = SimModel::AR1;
  int p = 0;
  int s = 0;
  double eta_scale = 1.0;
  std::uint64_t seed = 0;
};

//! Construct the population (Sigma, beta*) for a spec and place the class
//! means symmetrically: mu0 = -Sigma beta*/2, mu1 = +Sigma beta*/2, so the
//! mean difference is Sigma beta*, the stated beta* is the exact optimal
//! direction, and the midpoint is the origin.
GaussianModel build_model(const SimSpec& spec);

//! Draw n0 + n1 independent Gaussian rows (Cholesky factor times standard
//! normals plus the class mean). Deterministic given the seed; the two
//! classes consume distinct substreams.
std::pair<Matrix, Matrix> sample(const GaussianModel& model, Eigen::Index n0,
                                 Eigen::Index n1, std::uint64_t seed);

//! K-class variant of the synthetic setup: class 1 sits at the origin and
//! class k's mean is Sigma times a copy of beta* whose support is shifted to
//! coordinates (k-2)s+1 .. (k-1)s, so the classes are pairwise separated.
//! Requires (K-1) s <= p for the sparse recipes.
std::vector<Vector> kclass_means(const GaussianModel& model,
                                 const SimSpec& spec, int num_classes);

//! Draw rows from N(mean, model covariance).
Matrix sample_class(const GaussianModel& model,
                    const Eigen::Ref<const Vector>& mean, Eigen::Index n,
                    std::uint64_t seed);

}  // namespace panda
