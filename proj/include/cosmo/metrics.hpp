#pragma once

#include <cstdint>
#include <set>
#include <vector>

namespace cosmo {

enum class NodeKind { object, relation, affordance, affordance_slice };

/// Set cardinalities over an eligible universe:
/// tp = |G+ & M+|, tn = |G- & M-|, fp = |G- & M+|, fn = |G+ & M-|.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  NodeKind kind = NodeKind::object;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Throws Error(usage) when ground or predicted leaves the universe.
ConfusionCounts confusion_counts(const std::set<std::size_t>& ground,
                                 const std::set<std::size_t>& predicted,
                                 const std::set<std::size_t>& eligible,
                                 NodeKind kind = NodeKind::object);

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// P = tp/(tp+fp), R = tp/(tp+fn), F1 = 2PR/(P+R); each is 0 when its
/// denominator is 0.
Scores prf_scores(const ConfusionCounts& c) noexcept;

struct AveragePrecision {
  double value = 0.0;
  std::size_t scenes = 0;   // scenes contributing to the mean
  std::size_t skipped = 0;  // scenes with tp + fp == 0
};

/// Mean per-scene precision over scenes that predicted anything. Throws
/// Error(usage) when no scene remains.
AveragePrecision average_precision(const std::vector<ConfusionCounts>& per_scene);

/// One query's ground-truth positives within its eligible universe.
struct GroundTruth {
  std::set<std::size_t> positives;
  std::set<std::size_t> eligible;
};

struct ChanceLevel {
  Scores mean;
  double precision_stderr = 0.0;  // standard error of the per-trial precision
  std::size_t trials = 0;
};

/// Per trial, activates |G+| uniformly random eligible nodes of every query
/// and scores the summed counts; returns the mean over trials. Throws
/// Error(usage) for zero trials or when every universe is empty.
ChanceLevel chance_level(const std::vector<GroundTruth>& queries, std::size_t trials,
                         std::uint64_t seed);

}  // namespace cosmo
