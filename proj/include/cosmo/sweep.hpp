#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include "cosmo/dataset.hpp"
#include "cosmo/training.hpp"

namespace cosmo {

/// Cartesian grid around a base configuration. An absent axis keeps the
/// base value; a present axis must be non-empty.
struct SweepGrid {
  TrainConfig base;
  std::vector<std::size_t> layers;
  std::vector<std::size_t> hidden_units;
  std::vector<AnnealSchedule> schedules;

  /// Configurations in row-major order over (layers, hidden_units, schedules).
  std::vector<TrainConfig> points() const;
};

/// {"base": {...}, "layers": [..], "hidden_units": [..], "schedules":
/// [{"kind", "t0", "a"}]}. Unknown keys and empty axes are Error(usage).
SweepGrid parse_sweep_grid_json(std::string_view text);

struct SweepPoint {
  TrainConfig config;
  TrainResult result;
};

/// Trains every grid point; each worker owns its model and RNG streams, so
/// the output does not depend on `threads`.
std::vector<SweepPoint> run_sweep(const DatasetSplit& split, const VocabularySet& vocabulary,
                                  const SweepGrid& grid, std::size_t threads);

/// Long-form curves: point,layers,hidden,schedule,t0,a,epoch,split,block,value.
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace cosmo
