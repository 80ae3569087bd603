#include "support/fixtures.hpp"

namespace cosmo::testing {

VocabularySet tiny_vocabulary() {
  return VocabularySet({"a", "b"}, {{"near", "far"}}, {"use"});
}

std::unique_ptr<Model> zero_model(ModelKind kind, const ModelDims& dims) {
  return make_model(Params(kind, dims));
}

const Dataset& desk_dataset() {
  static const Dataset d = [] {
    const auto spec = planted_desk_spec();
    return Dataset{spec.vocabulary, synthesize_dataset(spec, 600, 3)};
  }();
  return d;
}

const DatasetSplit& desk_split() {
  static const DatasetSplit s = split_dataset(desk_dataset().scenes, SplitRatios{}, 1);
  return s;
}

const Model& desk_model() {
  static const std::unique_ptr<Model> m = [] {
    TrainConfig c;
    c.patience = 0;
    const auto r = train(desk_split(), desk_dataset().vocabulary, c);
    return make_model(r.params);
  }();
  return *m;
}

}  // namespace cosmo::testing
