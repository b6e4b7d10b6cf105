#include "run_config.hpp"

#include <set>

#include "cdcv/error.hpp"

namespace cdcv::cli {
namespace {

template <class T>
T value_of(const Json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError("config: invalid value for '" + key + "': " + j.dump());
  }
}

void apply_generator(FactorSpec& g, const Json& j) {
  if (!j.is_object()) throw InputError("config: 'generator' must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "sectors") g.sectors = value_of<std::size_t>(v, key);
    else if (key == "assets_per_sector") g.assets_per_sector = value_of<std::size_t>(v, key);
    else if (key == "rows") g.rows = value_of<std::size_t>(v, key);
    else if (key == "market_high") g.market_high = value_of<double>(v, key);
    else if (key == "market_low") g.market_low = value_of<double>(v, key);
    else if (key == "sector_high") g.sector_high = value_of<double>(v, key);
    else if (key == "sector_low") g.sector_low = value_of<double>(v, key);
    else if (key == "vol") g.vol = value_of<double>(v, key);
    else if (key == "innovation") g.innovation = innovation_from_string(value_of<std::string>(v, key));
    else if (key == "nu") g.nu = value_of<double>(v, key);
    else if (key == "seed") g.seed = value_of<std::uint64_t>(v, key);
    else throw InputError("config: unknown generator key '" + key + "'");
  }
}

Json generator_json(const FactorSpec& g) {
  return Json{{"sectors", g.sectors},         {"assets_per_sector", g.assets_per_sector},
              {"rows", g.rows},               {"market_high", g.market_high},
              {"market_low", g.market_low},   {"sector_high", g.sector_high},
              {"sector_low", g.sector_low},   {"vol", g.vol},
              {"innovation", to_string(g.innovation)}, {"nu", g.nu},
              {"seed", g.seed}};
}

}  // namespace

CdcvConfig RunConfig::default_model() {
  CdcvConfig c;
  c.clustering.metric = DistanceMetric::KendallTauBased;
  c.clustering.linkage = Linkage::AdaptedSingle;
  c.clustering.stop = StoppingRule::cluster_count(15);
  c.index.rule = IndexRule::VolatilityWeighted;
  c.index.upsilon = 11.0;
  c.index.market_source = MarketSource::FromAssets;
  return c;
}

std::vector<double> RunConfig::sweep_values() const {
  if (!values.empty()) return values;
  std::vector<double> v;
  if (axis == SweepAxis::Clusters) {
    for (int b = 3; b <= 18; ++b) v.push_back(b);
  } else {
    for (int u = 6; u <= 15; ++u) v.push_back(u);
  }
  return v;
}

void apply_json(RunConfig& c, const Json& j) {
  if (!j.is_object()) throw InputError("config: top level must be a JSON object");
  auto& cl = c.model.clustering;
  auto& ix = c.model.index;
  for (const auto& [key, v] : j.items()) {
    if (key == "schema_version") continue;
    if (key == "data") c.data = value_of<std::string>(v, key);
    else if (key == "window") c.window = value_of<std::size_t>(v, key);
    else if (key == "start") c.start = v.is_null() ? std::nullopt : std::optional(value_of<std::size_t>(v, key));
    else if (key == "metric") cl.metric = distance_metric_from_string(value_of<std::string>(v, key));
    else if (key == "linkage") cl.linkage = linkage_from_string(value_of<std::string>(v, key));
    else if (key == "a") cl.max_size = v.is_null() ? std::nullopt : std::optional(value_of<std::size_t>(v, key));
    else if (key == "b") {
      cl.stop = v.is_null() ? StoppingRule::none() : StoppingRule::cluster_count(value_of<std::size_t>(v, key));
    } else if (key == "threshold") {
      if (!v.is_null()) cl.stop = StoppingRule::distance_threshold(value_of<double>(v, key));
    } else if (key == "index_rule") ix.rule = index_rule_from_string(value_of<std::string>(v, key));
    else if (key == "upsilon") ix.upsilon = value_of<double>(v, key);
    else if (key == "market_source") ix.market_source = market_source_from_string(value_of<std::string>(v, key));
    else if (key == "severity") ix.severity = value_of<double>(v, key);
    else if (key == "market_caps") c.market_caps = value_of<std::map<std::string, double>>(v, key);
    else if (key == "labels") {
      c.model.fixed_labels = v.is_null() ? std::nullopt
                                         : std::optional(value_of<std::map<std::string, std::string>>(v, key));
    } else if (key == "seed") c.model.seed = value_of<std::uint64_t>(v, key);
    else if (key == "families") {
      std::vector<BicopFamily> fams;
      for (const auto& f : value_of<std::vector<std::string>>(v, key)) fams.push_back(bicop_family_from_string(f));
      if (fams.empty()) throw InputError("config: 'families' must not be empty");
      c.model.families = FamilySet(std::span<const BicopFamily>(fams));
    } else if (key == "joint_student") c.model.joint_student = value_of<bool>(v, key);
    else if (key == "sampling") c.model.sampling = index_sampling_from_string(value_of<std::string>(v, key));
    else if (key == "alphas") c.alphas = value_of<std::vector<double>>(v, key);
    else if (key == "modes") {
      c.modes.clear();
      for (const auto& m : value_of<std::vector<std::string>>(v, key)) c.modes.push_back(backtest_mode_from_string(m));
    } else if (key == "n_sims") c.n_sims = value_of<std::size_t>(v, key);
    else if (key == "max_steps") c.max_steps = value_of<std::size_t>(v, key);
    else if (key == "workers") c.workers = value_of<unsigned>(v, key);
    else if (key == "model") c.model_path = value_of<std::string>(v, key);
    else if (key == "samples") c.samples = value_of<std::size_t>(v, key);
    else if (key == "axis") c.axis = sweep_axis_from_string(value_of<std::string>(v, key));
    else if (key == "values") c.values = value_of<std::vector<double>>(v, key);
    else if (key == "windows") c.windows = value_of<std::size_t>(v, key);
    else if (key == "generator") apply_generator(c.generator, v);
    else if (key == "out") c.out = value_of<std::string>(v, key);
    else throw InputError("config: unknown key '" + key + "'");
  }
}

Json to_json(const RunConfig& c) {
  const auto& cl = c.model.clustering;
  const auto& ix = c.model.index;
  Json families = Json::array();
  for (auto f : c.model.families.members()) families.push_back(to_string(f));
  Json modes = Json::array();
  for (auto m : c.modes) modes.push_back(to_string(m));
  Json b = cl.stop.kind == StoppingRule::Kind::ClusterCount ? Json(cl.stop.clusters) : Json(nullptr);
  Json threshold =
      cl.stop.kind == StoppingRule::Kind::DistanceThreshold ? Json(cl.stop.threshold) : Json(nullptr);
  return Json{{"data", c.data},
              {"window", c.window},
              {"start", c.start ? Json(*c.start) : Json(nullptr)},
              {"metric", to_string(cl.metric)},
              {"linkage", to_string(cl.linkage)},
              {"a", cl.max_size ? Json(*cl.max_size) : Json(nullptr)},
              {"b", b},
              {"threshold", threshold},
              {"index_rule", to_string(ix.rule)},
              {"upsilon", ix.upsilon},
              {"market_source", to_string(ix.market_source)},
              {"severity", ix.severity},
              {"market_caps", c.market_caps},
              {"labels", c.model.fixed_labels ? Json(*c.model.fixed_labels) : Json(nullptr)},
              {"seed", c.model.seed},
              {"families", families},
              {"joint_student", c.model.joint_student},
              {"sampling", to_string(c.model.sampling)},
              {"alphas", c.alphas},
              {"modes", modes},
              {"n_sims", c.n_sims},
              {"max_steps", c.max_steps},
              {"workers", c.workers},
              {"model", c.model_path},
              {"samples", c.samples},
              {"axis", to_string(c.axis)},
              {"values", c.sweep_values()},
              {"windows", c.windows},
              {"generator", generator_json(c.generator)},
              {"out", c.out}};
}

}  // namespace cdcv::cli
