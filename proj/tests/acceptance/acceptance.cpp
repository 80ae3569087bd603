// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion either passes or is listed in
// kKnownFailures; an unexpected failure exits 1. --strict makes every FAIL
// fatal. --report <path> also writes the lines to a file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cosmo/evaluation.hpp"
#include "cosmo/metrics.hpp"
#include "cosmo/model_io.hpp"
#include "cosmo/oracle.hpp"
#include "cosmo/random.hpp"
#include "cosmo/schedule.hpp"
#include "cosmo/synthetic.hpp"
#include "cosmo/training.hpp"
#include "cosmo/verification.hpp"

namespace {

using namespace cosmo;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool passed = false;
  bool applicable = true;
  std::string detail;
};

// Criteria whose failure is analysed rather than fixed; see the README.
const std::set<int> kKnownFailures = {6};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome oracle_sampler_agreement() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t m = 0; m < 10; ++m) {
    const auto model = make_tiny_model(ModelKind::cosmo, 1000 + m);
    worst = std::max(worst, gibbs_oracle_agreement(*model, 100000, 1000, 2000 + m).max_l1);
  }
  const double dt = seconds_since(t0);
  return {worst <= 0.02 && dt < 60.0, true,
          "max per-unit L1 " + fmt("%.4f", worst) + ", " + fmt("%.1f s", dt)};
}

Outcome conditional_exactness() {
  double worst = 0.0;
  for (auto kind : {ModelKind::cosmo, ModelKind::gbm, ModelKind::rbm}) {
    for (std::uint64_t m = 0; m < 5; ++m) {
      worst = std::max(worst, max_conditional_error(*make_tiny_model(kind, 300 + m)));
    }
  }
  return {worst < 1e-10, true, "max |conditional - oracle| " + fmt("%.2e", worst)};
}

Outcome gradient_direction() {
  double worst = 0.0;
  for (auto kind : {ModelKind::cosmo, ModelKind::gbm, ModelKind::rbm}) {
    const auto model = make_tiny_model(kind, 77, 0.5);
    const auto data = random_scene_vectors(model->layout(), 8, 78);
    worst = std::max(worst, max_gradient_error(*model, data, 1e-4));
  }
  return {worst < 1e-5, true, "max coordinate error " + fmt("%.2e", worst)};
}

struct Planted {
  ContextSpec spec;
  DatasetSplit split;
};

Planted desk_data() {
  Planted p{planted_desk_spec(), {}};
  p.split = split_dataset(synthesize_dataset(p.spec, 600, 11), SplitRatios{}, 3);
  return p;
}

Planted suite_data() {
  Planted p{planted_suite_spec(PlantedSuiteOptions{}), {}};
  p.split = split_dataset(synthesize_dataset(p.spec, 600, 11), SplitRatios{}, 3);
  return p;
}

TrainConfig fixed_budget(ModelKind kind) {
  TrainConfig c;
  c.model_kind = kind;
  c.hidden = {16};
  c.epochs = 30;
  c.patience = 0;
  return c;
}

Outcome learning_works(const Planted& desk, const TrainResult& r) {
  (void)desk;
  const auto& a = *r.curves.front().validation;
  const auto& b = *r.curves.back().validation;
  const double ro = b.object / a.object, rr = b.relation / a.relation,
               ra = b.affordance / a.affordance;
  const bool ok = r.curves.size() == 30 && ro <= 0.5 && rr <= 0.5 && ra <= 0.5;
  return {ok, true,
          "epoch30/epoch1 object " + fmt("%.3f", ro) + " relation " + fmt("%.3f", rr) +
              " affordance " + fmt("%.3f", ra)};
}

std::vector<ReportRow> evaluate_planted(const Params& params, const std::string& name,
                                        const Planted& data, std::vector<int> tasks) {
  const auto model = make_model(params);
  EvalOptions o;
  o.tasks = std::move(tasks);
  o.theta_sweep = {};
  o.threads = 8;
  return evaluate(*model, name, data.split.test, "test", o);
}

Outcome task_recovery(const std::vector<ReportRow>& rows, double seconds) {
  bool ok = seconds < 600.0;
  std::string detail;
  for (const char* t : {"1", "2", "3", "4", "5", "6"}) {
    const auto* r = find_row(rows, t, 0.5);
    if (r == nullptr || !r->chance) return {false, true, std::string("missing task ") + t};
    const double ratio = r->micro.f1 / *r->chance;
    ok = ok && ratio >= 10.0;
    detail += std::string("T") + t + " F1/chance " + fmt("%.1f", ratio);
    if (std::strcmp(t, "2") == 0 || std::strcmp(t, "3") == 0) {
      ok = ok && r->micro.precision >= 0.8;
      detail += " P " + fmt("%.3f", r->micro.precision);
    }
    detail += "; ";
  }
  return {ok, true, detail + fmt("%.0f s", seconds)};
}

Outcome model_ordering(const std::vector<ReportRow>& c, const std::vector<ReportRow>& g,
                       const std::vector<ReportRow>& r) {
  bool ok = true;
  std::string detail;
  for (const char* t : {"1", "4"}) {
    const double fc = find_row(c, t, 0.5)->micro.f1;
    const double fg = find_row(g, t, 0.5)->micro.f1;
    const double fr = find_row(r, t, 0.5)->micro.f1;
    ok = ok && fc >= fg - 0.02 && fg >= fr - 0.02;
    detail += std::string("T") + t + " cosmo " + fmt("%.3f", fc) + " gbm " + fmt("%.3f", fg) +
              " rbm " + fmt("%.3f", fr) + "; ";
  }
  return {ok, true, detail};
}

Outcome rectification(const Params& params, const Planted& desk) {
  const auto model = make_model(params);
  EvalOptions o;
  o.tasks = {7};
  o.theta_sweep = {};
  o.rectify_lists = 100;
  const auto rows = evaluate(*model, "cosmo", desk.split.test, "test", o);
  const auto* before = find_row(rows, "7:before", 0.5);
  const auto* after = find_row(rows, "7:after", 0.5);
  const double gain = *after->ap - *before->ap;
  return {before->queries == 100 && gain >= 0.1, true,
          "AP " + fmt("%.3f", *before->ap) + " -> " + fmt("%.3f", *after->ap)};
}

Outcome schedule_formulas() {
  Rng rng = make_rng(8);
  std::size_t mismatches = 0, non_monotone = 0;
  for (int n = 0; n < 1000; ++n) {
    const double t0 = 0.1 + 10.0 * uniform01(rng);
    const auto i = static_cast<std::size_t>(uniform_index(rng, 1000));
    double a = 0.0, expected = 0.0;
    ScheduleKind kind{};
    switch (n % 3) {
      case 0:
        kind = ScheduleKind::emc;
        a = 0.8 + 0.1 * uniform01(rng);
        expected = t0 * std::pow(a, static_cast<double>(i));
        break;
      case 1:
        kind = ScheduleKind::li_mc;
        a = 1e-3 + 5.0 * uniform01(rng);
        expected = t0 / (1.0 + a * static_cast<double>(i));
        break;
      default:
        kind = ScheduleKind::log_mc;
        a = 1.0 + 1e-3 + 5.0 * uniform01(rng);
        expected = t0 / (1.0 + a * std::log(1.0 + static_cast<double>(i)));
        break;
    }
    const AnnealSchedule s(kind, t0, a);
    mismatches += temperature(s, i) != expected;
    for (std::size_t k = 1; k <= 50; ++k) non_monotone += temperature(s, k) > temperature(s, k - 1);
  }
  return {mismatches == 0 && non_monotone == 0, true,
          std::to_string(mismatches) + " mismatches, " + std::to_string(non_monotone) +
              " increases over 1000 tuples"};
}

Outcome metric_identities() {
  const double p = 0.1511, r = 0.3112;
  ConfusionCounts c;  // scale-free, so any counts with these ratios will do
  c.tp = std::size_t{1511} * 3112;
  c.fp = std::size_t{3112} * 10000 - c.tp;
  c.fn = std::size_t{1511} * 10000 - c.tp;
  const double f1 = prf_scores(c).f1;
  bool ok = std::abs(f1 - 0.2034) <= 0.0005 && std::abs(2 * p * r / (p + r) - 0.2034) <= 0.0005;
  std::size_t outside = 0, checked = 0;
  for (std::size_t n = 1; n <= 20; ++n) {
    for (std::size_t k = 1; k <= n; k += 3) {
      GroundTruth g;
      for (std::size_t x = 0; x < n; ++x) g.eligible.insert(x);
      for (std::size_t x = 0; x < k; ++x) g.positives.insert(x);
      const auto ch = chance_level({g}, 1000, 1000 * n + k);
      const double expect = static_cast<double>(k) / static_cast<double>(n);
      ++checked;
      outside += std::abs(ch.mean.precision - expect) > 3.0 * ch.precision_stderr + 1e-12;
    }
  }
  ok = ok && outside == 0;
  return {ok, true,
          "F1 " + fmt("%.4f", f1) + "; chance outside 3 SE in " + std::to_string(outside) + "/" +
              std::to_string(checked) + " universes"};
}

Outcome determinism(const Planted& desk) {
  namespace fs = std::filesystem;
  TrainConfig c;
  c.hidden = {8};
  c.epochs = 5;
  c.patience = 0;
  auto pipeline = [&](const fs::path& file) {
    const auto r = train(desk.split, desk.spec.vocabulary, c);
    save_model(ModelFile{r.params, desk.spec.vocabulary, c.schedule, train_config_to_json(c)}, file);
    const auto loaded = load_model(file);
    const auto model = make_model(loaded.params);
    EvalOptions o;
    o.tasks = {1, 2, 3, 4, 5, 6, 7};
    o.theta_sweep = {0.3, 0.7};
    o.rectify_lists = 20;
    std::ostringstream csv;
    write_report_csv(csv, evaluate(*model, "cosmo", desk.split.test, "test", o));
    return csv.str();
  };
  const auto dir = fs::temp_directory_path();
  const auto a = pipeline(dir / "cosmo_accept_a.cosmo");
  const auto b = pipeline(dir / "cosmo_accept_b.cosmo");
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const auto fa = slurp(dir / "cosmo_accept_a.cosmo");
  const auto fb = slurp(dir / "cosmo_accept_b.cosmo");
  const bool round_trip = serialize_model(deserialize_model(fa)) == fa;
  fs::remove(dir / "cosmo_accept_a.cosmo");
  fs::remove(dir / "cosmo_accept_b.cosmo");
  return {a == b && fa == fb && round_trip, true,
          std::string("reports ") + (a == b ? "identical" : "differ") + ", files " +
              (fa == fb ? "identical" : "differ") + ", round trip " +
              (round_trip ? "bit-exact" : "lossy")};
}

Outcome full_scale() {
  return {false, false, "published dataset not available offline; not run"};
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::ofstream file;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) {
      strict = true;
    } else if (std::strcmp(argv[i], "--report") == 0 && i + 1 < argc) {
      file.open(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: cosmo_acceptance [--strict] [--report path]\n");
      return 2;
    }
  }
  int unexpected = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    const char* status = !o.applicable ? "N/A " : o.passed ? "PASS" : "FAIL";
    char line[1024];
    std::snprintf(line, sizeof line, "%s %2d %s: %s\n", status, id, name, o.detail.c_str());
    std::fputs(line, stdout);
    std::fflush(stdout);
    if (file) file << line << std::flush;
    if (o.applicable && !o.passed && (strict || !kKnownFailures.count(id))) ++unexpected;
  };

  report(1, "oracle-sampler agreement", oracle_sampler_agreement());
  report(2, "conditional exactness", conditional_exactness());
  report(3, "gradient direction", gradient_direction());

  const auto desk = desk_data();
  const auto desk_run = train(desk.split, desk.spec.vocabulary, fixed_budget(ModelKind::cosmo));
  report(4, "learning works", learning_works(desk, desk_run));

  const auto suite = suite_data();
  const auto t5 = Clock::now();
  const auto cosmo_run = train(suite.split, suite.spec.vocabulary, fixed_budget(ModelKind::cosmo));
  const auto cosmo_rows = evaluate_planted(cosmo_run.params, "cosmo", suite, {1, 2, 3, 4, 5, 6});
  report(5, "task recovery", task_recovery(cosmo_rows, seconds_since(t5)));

  const auto gbm = train(suite.split, suite.spec.vocabulary, fixed_budget(ModelKind::gbm));
  const auto rbm = train(suite.split, suite.spec.vocabulary, fixed_budget(ModelKind::rbm));
  report(6, "model ordering",
         model_ordering(cosmo_rows, evaluate_planted(gbm.params, "gbm", suite, {1, 4}),
                        evaluate_planted(rbm.params, "rbm", suite, {1, 4})));
  {
    // Diagnostic only: the same comparison with five negative-phase steps.
    std::vector<std::vector<ReportRow>> rows;
    for (auto kind : {ModelKind::cosmo, ModelKind::gbm, ModelKind::rbm}) {
      auto c = fixed_budget(kind);
      c.gibbs_steps = 5;
      rows.push_back(evaluate_planted(train(suite.split, suite.spec.vocabulary, c).params,
                                      std::string(to_string(kind)), suite, {1, 4}));
    }
    const auto line = "      6 at 5 negative steps: " + model_ordering(rows[0], rows[1], rows[2]).detail;
    std::printf("%s\n", line.c_str());
    if (file) file << line << '\n';
  }

  report(7, "rectification direction", rectification(desk_run.params, desk));
  report(8, "schedule formulas", schedule_formulas());
  report(9, "metric identities", metric_identities());
  report(10, "determinism and serialization", determinism(desk));
  report(11, "full-scale run", full_scale());
  return unexpected == 0 ? 0 : 1;
}
