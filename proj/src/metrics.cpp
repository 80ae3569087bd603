#include "cosmo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "cosmo/error.hpp"
#include "cosmo/random.hpp"

namespace cosmo {

ConfusionCounts confusion_counts(const std::set<std::size_t>& ground,
                                 const std::set<std::size_t>& predicted,
                                 const std::set<std::size_t>& eligible, NodeKind kind) {
  if (!std::includes(eligible.begin(), eligible.end(), ground.begin(), ground.end())) {
    fail(ErrorKind::usage, "ground set leaves the eligible universe");
  }
  if (!std::includes(eligible.begin(), eligible.end(), predicted.begin(), predicted.end())) {
    fail(ErrorKind::usage, "predicted set leaves the eligible universe");
  }
  std::vector<std::size_t> both;
  std::set_intersection(ground.begin(), ground.end(), predicted.begin(), predicted.end(),
                        std::back_inserter(both));
  ConfusionCounts c;
  c.kind = kind;
  c.tp = both.size();
  c.fp = predicted.size() - c.tp;
  c.fn = ground.size() - c.tp;
  c.tn = eligible.size() - c.tp - c.fp - c.fn;
  return c;
}

Scores prf_scores(const ConfusionCounts& c) noexcept {
  Scores s;
  if (c.tp + c.fp > 0) s.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) s.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

AveragePrecision average_precision(const std::vector<ConfusionCounts>& per_scene) {
  AveragePrecision ap;
  double sum = 0.0;
  for (const auto& c : per_scene) {
    if (c.tp + c.fp == 0) {
      ++ap.skipped;
      continue;
    }
    sum += static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    ++ap.scenes;
  }
  if (ap.scenes == 0) fail(ErrorKind::usage, "average precision needs a scene with predictions");
  ap.value = sum / static_cast<double>(ap.scenes);
  return ap;
}

ChanceLevel chance_level(const std::vector<GroundTruth>& queries, std::size_t trials,
                         std::uint64_t seed) {
  if (trials == 0) fail(ErrorKind::usage, "chance level needs at least one trial");
  const bool any = std::any_of(queries.begin(), queries.end(),
                               [](const GroundTruth& g) { return !g.eligible.empty(); });
  if (!any) fail(ErrorKind::usage, "chance level needs a non-empty eligible universe");
  ChanceLevel out;
  out.trials = trials;
  std::vector<double> precisions;
  precisions.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, {t});
    ConfusionCounts total;
    for (const auto& q : queries) {
      std::vector<std::size_t> pool(q.eligible.begin(), q.eligible.end());
      const std::size_t k = std::min(q.positives.size(), pool.size());
      for (std::size_t i = 0; i < k; ++i) {
        std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
      }
      const std::set<std::size_t> picked(pool.begin(), pool.begin() + static_cast<long>(k));
      total += confusion_counts(q.positives, picked, q.eligible);
    }
    const Scores s = prf_scores(total);
    out.mean.precision += s.precision;
    out.mean.recall += s.recall;
    out.mean.f1 += s.f1;
    precisions.push_back(s.precision);
  }
  const double n = static_cast<double>(trials);
  out.mean.precision /= n;
  out.mean.recall /= n;
  out.mean.f1 /= n;
  if (trials > 1) {
    double var = 0.0;
    for (double p : precisions) var += (p - out.mean.precision) * (p - out.mean.precision);
    var /= (n - 1.0);
    out.precision_stderr = std::sqrt(var / n);
  }
  return out;
}

}  // namespace cosmo
