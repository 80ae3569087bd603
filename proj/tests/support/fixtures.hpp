#pragma once

#include <memory>
#include <vector>

#include "cosmo/dataset.hpp"
#include "cosmo/model.hpp"
#include "cosmo/synthetic.hpp"
#include "cosmo/training.hpp"

namespace cosmo::testing {

/// O=2, Rt=1, At=1 vocabulary: {a, b}, relation near/far, affordance use.
VocabularySet tiny_vocabulary();

/// Zero-weight model of the given kind and dims.
std::unique_ptr<Model> zero_model(ModelKind kind, const ModelDims& dims);

/// The twelve-object desk corpus: 600 scenes, split with seed 1.
const Dataset& desk_dataset();
const DatasetSplit& desk_split();

/// COSMO trained on the desk corpus for 30 epochs; built once per process.
const Model& desk_model();

}  // namespace cosmo::testing
