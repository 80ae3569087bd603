#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cosmo/model.hpp"
#include "cosmo/oracle.hpp"

namespace cosmo {

/// O=2, Rt=1, At=1, H=2 model with N(0, std^2) weights.
std::unique_ptr<Model> make_tiny_model(ModelKind kind, std::uint64_t seed, double std_dev = 1.0);

/// Energy evaluated straight from the named tensors with plain nested loops.
/// Shares no code with the model classes.
double naive_energy(const Params& params, const ModelState& state);

/// log Z by binary counting over every joint assignment using naive_energy.
double naive_log_partition(const Params& params);

/// Largest |Model::conditional - oracle Bayes quotient| over every state and
/// every free unit.
double max_conditional_error(const Model& model);

struct GibbsAgreement {
  /// Largest per-unit L1 distance between the empirical and exact Bernoulli
  /// marginals, i.e. 2 * |p_gibbs - p_exact|.
  double max_l1 = 0.0;
  /// Largest |empirical - exact| edge expectation.
  double max_edge_error = 0.0;
};

/// Single-chain Gibbs at T=1 from the all-zero state; marginals are averaged
/// over `sweeps` sweeps after `burn_in`.
GibbsAgreement gibbs_oracle_agreement(const Model& model, std::size_t sweeps,
                                      std::size_t burn_in, std::uint64_t seed);

/// Largest |alpha-free update direction (p+ - p-) - (-dKL/dw)| over all
/// coordinates, with dKL/dw from central differences of the exact KL.
double max_gradient_error(const Model& model, const std::vector<SceneVector>& data,
                          double epsilon = 1e-4);

/// Exact KL after each of `steps` updates with exact statistics at rate
/// alpha, preceded by the initial value.
std::vector<double> exact_descent_kl(const Model& model, const std::vector<SceneVector>& data,
                                     std::size_t steps, double alpha);

/// Random visible vectors for a tiny model, structural zeros respected.
std::vector<SceneVector> random_scene_vectors(const Layout& layout, std::size_t n,
                                              std::uint64_t seed);

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Built-in oracle property suite on freshly generated tiny models.
std::vector<PropertyResult> run_verification_suite(std::uint64_t seed);

}  // namespace cosmo
