#include "cosmo/sweep.hpp"

#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cosmo/error.hpp"
#include "cosmo/parallel.hpp"

namespace cosmo {

using nlohmann::json;

std::vector<TrainConfig> SweepGrid::points() const {
  const std::vector<std::size_t> no_size = {0};
  const auto& ls = layers.empty() ? no_size : layers;
  const auto& hs = hidden_units.empty() ? no_size : hidden_units;
  std::vector<TrainConfig> out;
  for (std::size_t l : ls) {
    for (std::size_t h : hs) {
      TrainConfig c = base;
      const std::size_t depth = l == 0 ? base.hidden.size() : l;
      if (l != 0 || h != 0) {
        c.hidden.clear();
        for (std::size_t m = 0; m < depth; ++m) {
          c.hidden.push_back(h != 0 ? h : base.hidden[std::min(m, base.hidden.size() - 1)]);
        }
      }
      if (schedules.empty()) {
        out.push_back(c);
        continue;
      }
      for (const auto& s : schedules) {
        c.schedule = s;
        out.push_back(c);
      }
    }
  }
  return out;
}

namespace {

std::vector<std::size_t> read_sizes(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) fail(ErrorKind::usage, "grid axis '" + key + "' must be a non-empty list");
  std::vector<std::size_t> out;
  for (const auto& x : v) {
    if (!x.is_number_integer() || x.get<long long>() <= 0) {
      fail(ErrorKind::usage, "grid axis '" + key + "' holds a non-positive or non-integer value");
    }
    out.push_back(x.get<std::size_t>());
  }
  return out;
}

}  // namespace

SweepGrid parse_sweep_grid_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::usage, std::string("grid is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::usage, "grid must be a JSON object");
  SweepGrid g;
  for (const auto& [key, value] : j.items()) {
    if (key == "base") {
      g.base = parse_train_config_json(value.dump());
    } else if (key == "layers") {
      g.layers = read_sizes(value, key);
    } else if (key == "hidden_units") {
      g.hidden_units = read_sizes(value, key);
    } else if (key == "schedules") {
      if (!value.is_array() || value.empty()) {
        fail(ErrorKind::usage, "grid axis 'schedules' must be a non-empty list");
      }
      for (const auto& s : value) {
        // Reuse the config parser so schedule keys are checked in one place.
        g.schedules.push_back(parse_train_config_json(json{{"schedule", s}}.dump()).schedule);
      }
    } else {
      fail(ErrorKind::usage, "unknown grid field '" + key + "'");
    }
  }
  for (const auto& c : g.points()) c.validate();
  return g;
}

std::vector<SweepPoint> run_sweep(const DatasetSplit& split, const VocabularySet& vocabulary,
                                  const SweepGrid& grid, std::size_t threads) {
  if (threads == 0) fail(ErrorKind::usage, "threads must be at least 1");
  const auto configs = grid.points();
  std::vector<SweepPoint> out(configs.size());
  parallel_for(configs.size(), threads, [&](std::size_t i) {
    out[i].config = configs[i];
    out[i].result = train(split, vocabulary, configs[i]);
  });
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "point,layers,hidden,schedule,t0,a,epoch,split,block,value\n";
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto& c = points[p].config;
    std::string hidden;
    for (std::size_t m = 0; m < c.hidden.size(); ++m) {
      hidden += (m ? "x" : "") + std::to_string(c.hidden[m]);
    }
    std::ostringstream prefix;
    prefix << p << ',' << c.hidden.size() << ',' << hidden << ',' << to_string(c.schedule.kind())
           << ',' << json(c.schedule.initial()).dump() << ',' << json(c.schedule.coefficient()).dump()
           << ',';
    std::ostringstream curves;
    write_curves_csv(curves, points[p].result.curves);
    std::string line;
    std::istringstream in(curves.str());
    std::getline(in, line);  // header
    while (std::getline(in, line)) out << prefix.str() << line << '\n';
  }
}

}  // namespace cosmo
