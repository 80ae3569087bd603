#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cosmo/metrics.hpp"
#include "cosmo/model.hpp"
#include "cosmo/tasks.hpp"

namespace cosmo {

struct EvalOptions {
  std::vector<int> tasks = {1, 2, 3, 4, 5, 6};
  TaskOptions task;  // theta here is the headline threshold
  std::vector<double> theta_sweep = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t chance_trials = 100;
  RectifyOptions rectify;
  /// Number of corrupted detection lists for Task 7; test scenes are reused
  /// in order when there are fewer.
  std::size_t rectify_lists = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const;
};

/// One report line. For Task 7 rows `ap` holds the average precision of the
/// object sets before or after rectification.
struct ReportRow {
  std::string task;
  std::string model;
  std::string split;
  double theta = 0.5;
  ConfusionCounts counts;  // summed over queries
  Scores micro;
  std::optional<double> chance;
  Scores macro;  // mean of per-query scores
  std::size_t queries = 0;
  std::optional<double> ap;
  std::size_t ap_skipped = 0;
};

/// Runs each task over `scenes` with the corruption protocol:
///   1, 4  query the scene as is; ground truth is its relations/affordances
///   2     one object removed; ground truth is that object
///   3     one absent object injected; ground truth is that object
///   5, 6  one query per distinct (act, subject) / (act, object) slice
///   7     one object dropped and one absent object injected per list
/// Emits one row at options.task.theta per task, then the theta sweep.
std::vector<ReportRow> evaluate(const Model& model, const std::string& model_name,
                                const std::vector<SceneDescription>& scenes,
                                const std::string& split_name, const EvalOptions& options);

/// Header: task,model,split,theta,tp,tn,fp,fn,precision,recall,f1,chance_p,
/// macro_precision,macro_recall,macro_f1,queries,ap,ap_skipped
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

/// Row for `task` at `theta`, if present.
const ReportRow* find_row(const std::vector<ReportRow>& rows, const std::string& task,
                          double theta);

}  // namespace cosmo
