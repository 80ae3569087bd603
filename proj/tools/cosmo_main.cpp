#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cosmo/cosmo.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Carries a C API status out of a subcommand.
struct Failure {
  int code;
  std::string message;
};

void check(cosmo_status s) {
  if (s != COSMO_OK) throw Failure{static_cast<int>(s), cosmo_last_error()};
}

[[noreturn]] void usage_error(const std::string& message) { throw Failure{1, message}; }
[[noreturn]] void data_error(const std::string& message) { throw Failure{2, message}; }

/// Owns a string returned by the C API.
std::string take(char* s) {
  std::string out = s ? s : "";
  cosmo_string_free(s);
  return out;
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) data_error(std::string("cannot read ") + what + " '" + path + "'");
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) data_error("cannot write '" + path.string() + "'");
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    usage_error(what + " is not valid JSON: " + e.what());
  }
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct DatasetHandle {
  cosmo_dataset* p = nullptr;
  ~DatasetHandle() { cosmo_dataset_free(p); }
};

struct ModelHandle {
  cosmo_model* p = nullptr;
  ~ModelHandle() { cosmo_model_free(p); }
};

json dataset_info(const cosmo_dataset* d) {
  char* s = nullptr;
  check(cosmo_dataset_info(d, &s));
  return json::parse(take(s));
}

json model_info(const cosmo_model* m) {
  char* s = nullptr;
  check(cosmo_model_info(m, &s));
  return json::parse(take(s));
}

/// One manifest per artifact-producing command, written last.
struct Manifest {
  json j;

  Manifest(const std::string& command, const std::vector<std::string>& argv) {
    j["command"] = command;
    j["argv"] = argv;
    j["version"] = cosmo_version();
    j["started"] = utc_now();
    j["config"] = nullptr;
    j["seed"] = nullptr;
    j["model"] = nullptr;
    j["dataset_fingerprint"] = nullptr;
    j["outputs"] = json::array();
  }

  void write(const fs::path& dir) {
    j["finished"] = utc_now();
    write_file(dir / "manifest.json", j.dump(2) + "\n");
  }
};

fs::path prepare_out(const std::string& out) {
  if (out.empty()) usage_error("--out is required");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) data_error("cannot create output directory '" + out + "': " + ec.message());
  return out;
}

std::vector<int> parse_tasks(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      const auto dash = item.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoi(item));
      } else {
        const int a = std::stoi(item.substr(0, dash)), b = std::stoi(item.substr(dash + 1));
        if (a > b) usage_error("bad task range '" + item + "'");
        for (int t = a; t <= b; ++t) out.push_back(t);
      }
    } catch (const std::logic_error&) {
      usage_error("bad task list entry '" + item + "'");
    }
  }
  if (out.empty()) usage_error("task list is empty");
  return out;
}

std::vector<std::size_t> parse_indices(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoul(item));
    } catch (const std::logic_error&) {
      usage_error("bad hidden unit index '" + item + "'");
    }
  }
  return out;
}

struct Flags {
  std::string config, dataset, model, out, tasks = "1-6", split = "test", preset = "desk";
  std::string hidden, detections, label_map;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  std::optional<double> theta, theta_add, theta_drop;
  std::optional<std::size_t> gibbs_steps;
  std::size_t n = 600;
  std::size_t draws = 1;
  bool free_others = false;
};

int cmd_synth(const Flags& f, Manifest& m) {
  const fs::path dir = prepare_out(f.out);
  std::string spec;
  if (!f.config.empty()) {
    spec = read_file(f.config, "context spec");
  } else {
    char* s = nullptr;
    check(cosmo_context_spec_preset(f.preset.c_str(), nullptr, &s));
    spec = take(s);
  }
  const std::uint64_t seed = f.seed.value_or(1);
  DatasetHandle d;
  check(cosmo_dataset_synthesize(spec.c_str(), f.n, seed, &d.p));
  check(cosmo_dataset_save(d.p, (dir / "dataset.json").c_str()));
  write_file(dir / "context_spec.json", spec);
  m.j["config"] = parse_json(spec, "context spec");
  m.j["seed"] = seed;
  m.j["dataset_fingerprint"] = dataset_info(d.p)["fingerprint"];
  m.j["outputs"] = {"dataset.json", "context_spec.json"};
  m.write(dir);
  return 0;
}

int cmd_train(const Flags& f, Manifest& m) {
  if (f.dataset.empty()) usage_error("--dataset is required");
  json config = f.config.empty() ? json::object() : parse_json(read_file(f.config, "config"), "config");
  if (!config.is_object()) usage_error("config must be a JSON object");
  if (f.seed) config["seed"] = *f.seed;
  if (f.gibbs_steps) config["gibbs_steps"] = *f.gibbs_steps;
  DatasetHandle d;
  check(cosmo_dataset_load(f.dataset.c_str(), &d.p));
  const fs::path dir = prepare_out(f.out);
  ModelHandle model;
  char* curves = nullptr;
  char* summary = nullptr;
  check(cosmo_train(d.p, config.dump().c_str(), &model.p, &curves, &summary));
  const std::string curves_csv = take(curves);
  const json sum = json::parse(take(summary));
  check(cosmo_model_save(model.p, (dir / "model.cosmo").c_str()));
  write_file(dir / "curves.csv", curves_csv);
  const json info = model_info(model.p);
  m.j["config"] = info["config"];
  m.j["seed"] = info["config"]["seed"];
  m.j["model"] = (dir / "model.cosmo").string();
  m.j["dataset"] = f.dataset;
  m.j["dataset_fingerprint"] = dataset_info(d.p)["fingerprint"];
  m.j["training"] = sum;
  m.j["outputs"] = {"model.cosmo", "curves.csv"};
  m.write(dir);
  std::cout << sum.dump() << "\n";
  return 0;
}

int cmd_eval(const Flags& f, Manifest& m) {
  if (f.model.empty()) usage_error("--model is required");
  if (f.dataset.empty()) usage_error("--dataset is required");
  json options = f.config.empty() ? json::object()
                                   : parse_json(read_file(f.config, "eval options"), "eval options");
  options["tasks"] = parse_tasks(f.tasks);
  options["split"] = f.split;
  options["threads"] = f.threads;
  if (f.seed) options["seed"] = *f.seed;
  if (f.theta) options["theta"] = *f.theta;
  if (f.gibbs_steps) options["gibbs_steps"] = *f.gibbs_steps;
  ModelHandle model;
  check(cosmo_model_load(f.model.c_str(), &model.p));
  DatasetHandle d;
  check(cosmo_dataset_load(f.dataset.c_str(), &d.p));
  const fs::path dir = prepare_out(f.out);
  char* report = nullptr;
  check(cosmo_evaluate(model.p, d.p, options.dump().c_str(), &report));
  write_file(dir / "report.csv", take(report));
  m.j["config"] = options;
  m.j["seed"] = options.value("seed", std::uint64_t{0});
  m.j["model"] = f.model;
  m.j["dataset"] = f.dataset;
  m.j["dataset_fingerprint"] = dataset_info(d.p)["fingerprint"];
  m.j["outputs"] = {"report.csv"};
  m.write(dir);
  return 0;
}

int cmd_sweep(const Flags& f, Manifest& m) {
  if (f.config.empty()) usage_error("--config (grid) is required");
  if (f.dataset.empty()) usage_error("--dataset is required");
  json grid = parse_json(read_file(f.config, "grid"), "grid");
  if (!grid.is_object()) usage_error("grid must be a JSON object");
  if (f.seed) grid["base"]["seed"] = *f.seed;
  DatasetHandle d;
  check(cosmo_dataset_load(f.dataset.c_str(), &d.p));
  const fs::path dir = prepare_out(f.out);
  char* curves = nullptr;
  check(cosmo_sweep(d.p, grid.dump().c_str(), f.threads, &curves));
  write_file(dir / "sweep.csv", take(curves));
  m.j["config"] = grid;
  m.j["seed"] = grid.contains("base") ? grid["base"].value("seed", json(1)) : json(1);
  m.j["dataset"] = f.dataset;
  m.j["dataset_fingerprint"] = dataset_info(d.p)["fingerprint"];
  m.j["outputs"] = {"sweep.csv"};
  m.write(dir);
  return 0;
}

int cmd_generate(const Flags& f, Manifest& m) {
  if (f.model.empty()) usage_error("--model is required");
  json options = {{"hidden", parse_indices(f.hidden)},
                  {"seed", f.seed.value_or(0)},
                  {"free_others", f.free_others}};
  if (f.gibbs_steps) options["gibbs_steps"] = *f.gibbs_steps;
  ModelHandle model;
  check(cosmo_model_load(f.model.c_str(), &model.p));
  const fs::path dir = prepare_out(f.out);
  char* scenes = nullptr;
  check(cosmo_generate(model.p, options.dump().c_str(), f.draws, &scenes));
  write_file(dir / "scenes.json", take(scenes));
  options["n"] = f.draws;
  m.j["config"] = options;
  m.j["seed"] = options["seed"];
  m.j["model"] = f.model;
  m.j["outputs"] = {"scenes.json"};
  m.write(dir);
  return 0;
}

int cmd_rectify(const Flags& f, Manifest& m) {
  if (f.model.empty()) usage_error("--model is required");
  if (f.detections.empty()) usage_error("--detections is required");
  json options = {{"seed", f.seed.value_or(0)}};
  if (f.gibbs_steps) options["gibbs_steps"] = *f.gibbs_steps;
  if (f.theta_add) options["theta_add"] = *f.theta_add;
  if (f.theta_drop) options["theta_drop"] = *f.theta_drop;
  const std::string detections = read_file(f.detections, "detections");
  std::optional<std::string> label_map;
  if (!f.label_map.empty()) label_map = read_file(f.label_map, "label map");
  ModelHandle model;
  check(cosmo_model_load(f.model.c_str(), &model.p));
  char* result = nullptr;
  check(cosmo_rectify(model.p, detections.c_str(), label_map ? label_map->c_str() : nullptr,
                      options.dump().c_str(), &result));
  const std::string text = take(result);
  if (f.out.empty()) {
    std::cout << text << "\n";
    return 0;
  }
  const fs::path dir = prepare_out(f.out);
  write_file(dir / "rectified.json", text + "\n");
  m.j["config"] = options;
  m.j["seed"] = options["seed"];
  m.j["model"] = f.model;
  m.j["detections"] = f.detections;
  m.j["outputs"] = {"rectified.json"};
  m.write(dir);
  return 0;
}

int cmd_inspect(const Flags& f) {
  if (f.model.empty() == f.dataset.empty()) usage_error("give exactly one of --model, --dataset");
  if (!f.model.empty()) {
    ModelHandle model;
    check(cosmo_model_load(f.model.c_str(), &model.p));
    std::cout << model_info(model.p).dump(2) << "\n";
  } else {
    DatasetHandle d;
    check(cosmo_dataset_load(f.dataset.c_str(), &d.p));
    std::cout << dataset_info(d.p).dump(2) << "\n";
  }
  return 0;
}

int cmd_verify(const Flags& f) {
  if (!f.model.empty()) {
    ModelHandle model;
    if (cosmo_model_load(f.model.c_str(), &model.p) != COSMO_OK) {
      std::cerr << "model load failed: " << cosmo_last_error() << "\n";
    } else {
      std::cout << "model loaded: " << model_info(model.p)["model_kind"].get<std::string>() << "\n";
    }
  }
  char* report = nullptr;
  int passed = 0;
  check(cosmo_verify(f.seed.value_or(1), &report, &passed));
  for (const auto& r : json::parse(take(report))) {
    std::cout << (r["passed"].get<bool>() ? "PASS " : "FAIL ") << r["name"].get<std::string>()
              << " (" << r["detail"].get<std::string>() << ")\n";
  }
  return passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tri-way Boltzmann machine scene modeling"};
  app.set_version_flag("--version", std::string(cosmo_version()));
  app.require_subcommand(1);
  Flags f;

  auto seed = [&](CLI::App* c) { c->add_option("--seed", f.seed, "Seed for every random stream"); };
  auto out = [&](CLI::App* c) { c->add_option("--out", f.out, "Output directory"); };

  auto* synth = app.add_subcommand("synth", "Synthesize a planted-context dataset");
  synth->add_option("--config", f.config, "Context spec JSON (overrides --preset)");
  synth->add_option("--preset", f.preset, "desk or suite")->check(CLI::IsMember({"desk", "suite"}));
  synth->add_option("--n", f.n, "Number of scenes");
  seed(synth);
  out(synth);

  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--config", f.config, "Training config JSON");
  train->add_option("--dataset", f.dataset, "Dataset JSON");
  train->add_option("--gibbs-steps", f.gibbs_steps, "Negative-phase steps");
  seed(train);
  out(train);

  auto* eval = app.add_subcommand("eval", "Evaluate tasks on a dataset split");
  eval->add_option("--config", f.config, "Evaluation options JSON");
  eval->add_option("--model", f.model, "Model file");
  eval->add_option("--dataset", f.dataset, "Dataset JSON");
  eval->add_option("--tasks", f.tasks, "Task list, e.g. 1-6 or 1,4,7");
  eval->add_option("--split", f.split, "train, validation or test");
  eval->add_option("--threads", f.threads, "Worker threads");
  eval->add_option("--theta", f.theta, "Activation threshold");
  eval->add_option("--gibbs-steps", f.gibbs_steps, "Relaxation sweeps per query");
  seed(eval);
  out(eval);

  auto* sweep = app.add_subcommand("sweep", "Train a hyper-parameter grid");
  sweep->add_option("--config", f.config, "Grid JSON");
  sweep->add_option("--dataset", f.dataset, "Dataset JSON");
  sweep->add_option("--threads", f.threads, "Worker threads");
  seed(sweep);
  out(sweep);

  auto* generate = app.add_subcommand("generate", "Generate scenes from clamped hidden units");
  generate->add_option("--model", f.model, "Model file");
  generate->add_option("--hidden", f.hidden, "Comma-separated first-layer hidden units");
  generate->add_option("--n", f.draws, "Number of scenes");
  generate->add_option("--gibbs-steps", f.gibbs_steps, "Sweeps per scene");
  generate->add_flag("--free-others", f.free_others, "Leave unselected hidden units free");
  seed(generate);
  out(generate);

  auto* rectify = app.add_subcommand("rectify", "Rectify a detection list");
  rectify->add_option("--model", f.model, "Model file");
  rectify->add_option("--detections", f.detections, "Detections JSON");
  rectify->add_option("--label-map", f.label_map, "Detector label to object name map JSON");
  rectify->add_option("--theta-add", f.theta_add, "Add threshold");
  rectify->add_option("--theta-drop", f.theta_drop, "Drop threshold");
  rectify->add_option("--gibbs-steps", f.gibbs_steps, "Relaxation sweeps");
  seed(rectify);
  out(rectify);

  auto* inspect = app.add_subcommand("inspect", "Print model or dataset metadata");
  inspect->add_option("--model", f.model, "Model file");
  inspect->add_option("--dataset", f.dataset, "Dataset JSON");

  auto* verify = app.add_subcommand("verify", "Run the exact-enumeration property suite");
  verify->add_option("--model", f.model, "Also try loading this model file");
  seed(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const std::vector<std::string> args(argv, argv + argc);
  try {
    auto* cmd = app.get_subcommands().front();
    Manifest m(cmd->get_name(), args);
    if (cmd == synth) return cmd_synth(f, m);
    if (cmd == train) return cmd_train(f, m);
    if (cmd == eval) return cmd_eval(f, m);
    if (cmd == sweep) return cmd_sweep(f, m);
    if (cmd == generate) return cmd_generate(f, m);
    if (cmd == rectify) return cmd_rectify(f, m);
    if (cmd == inspect) return cmd_inspect(f);
    return cmd_verify(f);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
}
