#include "cosmo/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <json.hpp>

#include "cosmo/dataset.hpp"
#include "cosmo/error.hpp"
#include "cosmo/parallel.hpp"

namespace cosmo {

void EvalOptions::validate() const {
  if (tasks.empty()) fail(ErrorKind::usage, "task list is empty");
  for (int t : tasks) {
    if (t < 1 || t > 7) fail(ErrorKind::usage, "evaluable tasks are 1..7, got " + std::to_string(t));
  }
  task.validate();
  for (double t : theta_sweep) {
    if (!(t > 0.0 && t < 1.0)) fail(ErrorKind::usage, "sweep thresholds must lie in (0, 1)");
  }
  if (chance_trials == 0) fail(ErrorKind::usage, "chance_trials must be at least 1");
  if (threads == 0) fail(ErrorKind::usage, "threads must be at least 1");
}

namespace {

constexpr std::uint64_t kCorruptStream = 0xc0;
constexpr std::uint64_t kQueryStream = 0x9a;
constexpr std::uint64_t kChanceStream = 0xc4a;

struct Job {
  int task = 0;
  SceneDescription query;
  std::size_t act = 0;
  std::size_t anchor = 0;
  std::set<std::size_t> positives;
  std::uint64_t seed = 0;
};

struct Outcome {
  std::vector<NodeProbability> eligible;
  std::set<std::size_t> positives;
};

NodeKind kind_of(int task) {
  switch (task) {
    case 1: return NodeKind::relation;
    case 4: return NodeKind::affordance;
    case 5:
    case 6: return NodeKind::affordance_slice;
    default: return NodeKind::object;
  }
}

std::vector<Job> make_jobs(int task, const Layout& layout,
                           const std::vector<SceneDescription>& scenes, std::uint64_t seed) {
  std::vector<Job> jobs;
  const auto t = static_cast<std::uint64_t>(task);
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto& scene = scenes[i];
    Job job;
    job.task = task;
    job.seed = stream_seed(seed, {kQueryStream, t, i});
    switch (task) {
      case 1:
        if (scene.objects.size() < 2) break;
        job.query = scene;
        for (const auto& r : scene.relations) {
          job.positives.insert(layout.relation(r.type, r.subject, r.object));
        }
        jobs.push_back(std::move(job));
        break;
      case 4:
        if (scene.objects.size() < 2) break;
        job.query = scene;
        for (const auto& a : scene.affordances) {
          job.positives.insert(layout.affordance(a.type, a.subject, a.object));
        }
        jobs.push_back(std::move(job));
        break;
      case 2:
      case 3: {
        const bool remove = task == 2;
        if (remove ? scene.objects.empty() : scene.objects.size() >= layout.objects()) break;
        Rng rng = make_rng(seed, {kCorruptStream, t, i});
        auto c = corrupt_scene(scene, layout.objects(),
                               remove ? CorruptionMode::remove_objects : CorruptionMode::add_objects,
                               1, rng);
        job.query = std::move(c.scene);
        job.positives = std::move(c.changed);
        jobs.push_back(std::move(job));
        break;
      }
      case 5:
      case 6: {
        std::map<std::pair<std::size_t, std::size_t>, std::set<std::size_t>> slices;
        for (const auto& a : scene.affordances) {
          if (task == 5) {
            slices[{a.type, a.subject}].insert(layout.affordance(a.type, a.subject, a.object));
          } else {
            slices[{a.type, a.object}].insert(layout.affordance(a.type, a.subject, a.object));
          }
        }
        std::size_t q = 0;
        for (auto& [key, positives] : slices) {
          Job s;
          s.task = task;
          s.query = scene;
          s.act = key.first;
          s.anchor = key.second;
          s.positives = std::move(positives);
          s.seed = stream_seed(seed, {kQueryStream, t, i, q++});
          jobs.push_back(std::move(s));
        }
        break;
      }
      default: break;
    }
  }
  return jobs;
}

Outcome run_job(const Model& model, const Job& job, const TaskOptions& base) {
  TaskOptions o = base;
  o.seed = job.seed;
  TaskResult r;
  switch (job.task) {
    case 1: r = estimate_relations(model, job.query, o); break;
    case 2: r = find_missing_objects(model, job.query, o); break;
    case 3: r = find_extra_objects(model, job.query, o); break;
    case 4: r = predict_affordances(model, job.query, o); break;
    case 5: r = find_afforded_object(model, job.act, job.anchor, job.query, o); break;
    case 6: r = find_actor(model, job.act, job.anchor, job.query, o); break;
    default: fail(ErrorKind::internal, "unexpected task in evaluation");
  }
  return {std::move(r.eligible), job.positives};
}

ReportRow score_at(const std::vector<Outcome>& outcomes, int task, double theta) {
  ReportRow row;
  row.task = std::to_string(task);
  row.theta = theta;
  row.counts.kind = kind_of(task);
  const bool below = task == 3;
  for (const auto& o : outcomes) {
    std::set<std::size_t> eligible, predicted;
    for (const auto& n : o.eligible) {
      eligible.insert(n.slot);
      if (below ? n.probability < theta : n.probability > theta) predicted.insert(n.slot);
    }
    const auto c = confusion_counts(o.positives, predicted, eligible, row.counts.kind);
    row.counts += c;
    const auto s = prf_scores(c);
    row.macro.precision += s.precision;
    row.macro.recall += s.recall;
    row.macro.f1 += s.f1;
  }
  row.queries = outcomes.size();
  if (!outcomes.empty()) {
    const double n = static_cast<double>(outcomes.size());
    row.macro.precision /= n;
    row.macro.recall /= n;
    row.macro.f1 /= n;
  }
  row.micro = prf_scores(row.counts);
  return row;
}

void rectification_rows(const Model& model, const std::vector<SceneDescription>& scenes,
                        const EvalOptions& options, std::vector<ReportRow>& rows) {
  const Layout& layout = model.layout();
  std::vector<const SceneDescription*> usable;
  for (const auto& s : scenes) {
    if (s.objects.size() >= 2 && s.objects.size() < layout.objects()) usable.push_back(&s);
  }
  if (usable.empty() || options.rectify_lists == 0) return;
  std::set<std::size_t> universe;
  for (std::size_t o = 0; o < layout.objects(); ++o) universe.insert(o);

  const std::size_t n = options.rectify_lists;
  std::vector<ConfusionCounts> before(n), after(n);
  parallel_for(n, options.threads, [&](std::size_t l) {
    const SceneDescription& truth = *usable[l % usable.size()];
    Rng rng = make_rng(options.seed, {kCorruptStream, 7, l});
    std::vector<std::size_t> present(truth.objects.begin(), truth.objects.end());
    std::vector<std::size_t> absent;
    for (std::size_t o = 0; o < layout.objects(); ++o) {
      if (!truth.objects.contains(o)) absent.push_back(o);
    }
    std::set<std::size_t> detections = truth.objects;
    detections.erase(present[uniform_index(rng, present.size())]);
    detections.insert(absent[uniform_index(rng, absent.size())]);
    RectifyOptions ro = options.rectify;
    ro.task.seed = stream_seed(options.seed, {kQueryStream, 7, l});
    const auto r = rectify_detections(model, detections, ro);
    before[l] = confusion_counts(truth.objects, detections, universe);
    after[l] = confusion_counts(truth.objects, r.objects(), universe);
  });
  for (int phase = 0; phase < 2; ++phase) {
    const auto& per = phase == 0 ? before : after;
    ReportRow row;
    row.task = phase == 0 ? "7:before" : "7:after";
    row.theta = options.task.theta;
    for (const auto& c : per) {
      row.counts += c;
      const auto s = prf_scores(c);
      row.macro.precision += s.precision;
      row.macro.recall += s.recall;
      row.macro.f1 += s.f1;
    }
    row.queries = per.size();
    row.macro.precision /= static_cast<double>(n);
    row.macro.recall /= static_cast<double>(n);
    row.macro.f1 /= static_cast<double>(n);
    row.micro = prf_scores(row.counts);
    const auto ap = average_precision(per);
    row.ap = ap.value;
    row.ap_skipped = ap.skipped;
    rows.push_back(row);
  }
}

}  // namespace

std::vector<ReportRow> evaluate(const Model& model, const std::string& model_name,
                                const std::vector<SceneDescription>& scenes,
                                const std::string& split_name, const EvalOptions& options) {
  options.validate();
  if (scenes.empty()) fail(ErrorKind::usage, "no scenes to evaluate");
  std::vector<ReportRow> rows;
  for (int task : options.tasks) {
    if (task == 7) {
      rectification_rows(model, scenes, options, rows);
      continue;
    }
    const auto jobs = make_jobs(task, model.layout(), scenes, options.seed);
    std::vector<Outcome> outcomes(jobs.size());
    parallel_for(jobs.size(), options.threads,
                 [&](std::size_t i) { outcomes[i] = run_job(model, jobs[i], options.task); });
    std::erase_if(outcomes, [](const Outcome& o) { return o.eligible.empty(); });
    std::optional<double> chance;
    if (!outcomes.empty()) {
      std::vector<GroundTruth> truth;
      truth.reserve(outcomes.size());
      for (const auto& o : outcomes) {
        GroundTruth g{o.positives, {}};
        for (const auto& n : o.eligible) g.eligible.insert(n.slot);
        truth.push_back(std::move(g));
      }
      chance = chance_level(truth, options.chance_trials,
                            stream_seed(options.seed, {kChanceStream, static_cast<std::uint64_t>(task)}))
                   .mean.precision;
    }
    std::vector<double> thetas = {options.task.theta};
    for (double t : options.theta_sweep) {
      if (std::abs(t - options.task.theta) > 1e-12) thetas.push_back(t);
    }
    for (double theta : thetas) {
      ReportRow row = score_at(outcomes, task, theta);
      row.chance = chance;
      rows.push_back(std::move(row));
    }
  }
  for (auto& row : rows) {
    row.model = model_name;
    row.split = split_name;
  }
  return rows;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  using nlohmann::json;
  auto num = [](double x) { return json(x).dump(); };
  out << "task,model,split,theta,tp,tn,fp,fn,precision,recall,f1,chance_p,"
         "macro_precision,macro_recall,macro_f1,queries,ap,ap_skipped\n";
  for (const auto& r : rows) {
    out << r.task << ',' << r.model << ',' << r.split << ',' << num(r.theta) << ',' << r.counts.tp
        << ',' << r.counts.tn << ',' << r.counts.fp << ',' << r.counts.fn << ','
        << num(r.micro.precision) << ',' << num(r.micro.recall) << ',' << num(r.micro.f1) << ','
        << (r.chance ? num(*r.chance) : "") << ',' << num(r.macro.precision) << ','
        << num(r.macro.recall) << ',' << num(r.macro.f1) << ',' << r.queries << ','
        << (r.ap ? num(*r.ap) : "") << ',' << r.ap_skipped << '\n';
  }
}

const ReportRow* find_row(const std::vector<ReportRow>& rows, const std::string& task,
                          double theta) {
  for (const auto& r : rows) {
    if (r.task == task && std::abs(r.theta - theta) < 1e-12) return &r;
  }
  return nullptr;
}

}  // namespace cosmo
