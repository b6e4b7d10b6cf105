#include "cdcv/serialize.hpp"

#include <fstream>

#include "cdcv/error.hpp"

namespace cdcv {
namespace {

template <class T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("JSON: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("JSON: field '") + key + "': " + e.what());
  }
}

}  // namespace

void to_json(Json& j, const MarginalFit& f) {
  Json params{{"location", f.location}, {"scale", f.scale}};
  if (f.family != MarginalFamily::Normal) params["nu"] = f.nu;
  if (f.family == MarginalFamily::SkewStudentT) params["gamma"] = f.gamma;
  j = Json{{"family", to_string(f.family)}, {"params", params}, {"loglik", f.loglik}, {"aic", f.aic},
           {"n_obs", f.n_obs}};
}

void from_json(const Json& j, MarginalFit& f) {
  f.family = marginal_family_from_string(get<std::string>(j, "family"));
  const Json& p = j.at("params");
  f.location = get<double>(p, "location");
  f.scale = get<double>(p, "scale");
  f.nu = f.family == MarginalFamily::Normal ? 0.0 : get<double>(p, "nu");
  f.gamma = f.family == MarginalFamily::SkewStudentT ? get<double>(p, "gamma") : 1.0;
  f.loglik = get<double>(j, "loglik");
  f.aic = get<double>(j, "aic");
  f.n_obs = get<std::size_t>(j, "n_obs");
  f.validate();
}

void to_json(Json& j, const BivariateCopulaFit& f) {
  Json params = Json::object();
  switch (f.copula.family) {
    case BicopFamily::Gaussian: params["rho"] = f.copula.param; break;
    case BicopFamily::StudentT:
      params["rho"] = f.copula.param;
      params["nu"] = f.copula.nu;
      break;
    case BicopFamily::Clayton:
    case BicopFamily::Frank: params["theta"] = f.copula.param; break;
    case BicopFamily::Independence: break;
  }
  j = Json{{"family", to_string(f.copula.family)}, {"params", params}, {"loglik", f.loglik}, {"aic", f.aic},
           {"n_obs", f.n_obs}};
}

void from_json(const Json& j, BivariateCopulaFit& f) {
  f.copula = {};
  f.copula.family = bicop_family_from_string(get<std::string>(j, "family"));
  const Json& p = j.at("params");
  switch (f.copula.family) {
    case BicopFamily::Gaussian: f.copula.param = get<double>(p, "rho"); break;
    case BicopFamily::StudentT:
      f.copula.param = get<double>(p, "rho");
      f.copula.nu = get<double>(p, "nu");
      break;
    case BicopFamily::Clayton:
    case BicopFamily::Frank: f.copula.param = get<double>(p, "theta"); break;
    case BicopFamily::Independence: break;
  }
  f.loglik = get<double>(j, "loglik");
  f.aic = get<double>(j, "aic");
  f.n_obs = j.value("n_obs", std::size_t{0});
  f.copula.validate();
}

void to_json(Json& j, const ClusterPartition& p) {
  Json clusters = Json::array();
  for (const auto& c : p.clusters) {
    Json ids = Json::array();
    for (auto i : c) ids.push_back(p.assets[i]);
    clusters.push_back(ids);
  }
  Json trace = Json::array();
  for (const auto& m : p.trace) trace.push_back(Json::array({m.x, m.y, m.distance}));
  j = Json{{"assets", p.assets}, {"clusters", clusters}, {"trace", trace}, {"stalled", p.stalled}};
}

void from_json(const Json& j, ClusterPartition& p) {
  p = {};
  p.assets = get<std::vector<std::string>>(j, "assets");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < p.assets.size(); ++i) index[p.assets[i]] = i;
  for (const auto& c : j.at("clusters")) {
    std::vector<std::size_t> members;
    for (const auto& id : c) {
      auto it = index.find(id.get<std::string>());
      if (it == index.end()) throw InputError("JSON: partition names unknown asset '" + id.get<std::string>() + "'");
      members.push_back(it->second);
    }
    p.clusters.push_back(std::move(members));
  }
  for (const auto& m : j.at("trace")) p.trace.push_back({m.at(0).get<std::size_t>(), m.at(1).get<std::size_t>(), m.at(2).get<double>()});
  p.stalled = j.value("stalled", false);
  p.validate();
}

void to_json(Json& j, const IndexSeries& s) {
  j = Json{{"rule", to_string(s.rule)}, {"upsilon", s.upsilon}, {"seed", s.seed}, {"members", s.members},
           {"values", s.values}, {"raw", s.raw}};
}

void from_json(const Json& j, IndexSeries& s) {
  s.rule = index_rule_from_string(get<std::string>(j, "rule"));
  s.upsilon = get<double>(j, "upsilon");
  s.seed = get<std::uint64_t>(j, "seed");
  s.members = get<std::vector<std::string>>(j, "members");
  s.values = get<std::vector<double>>(j, "values");
  s.raw = get<std::vector<double>>(j, "raw");
}

void to_json(Json& j, const JointCopulaFit& f) {
  Json corr = Json::array();
  for (Eigen::Index r = 0; r < f.corr.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < f.corr.cols(); ++c) row.push_back(f.corr(r, c));
    corr.push_back(row);
  }
  j = Json{{"family", to_string(f.family)}, {"corr", corr}};
  if (f.family == JointFamily::StudentT) j["nu"] = f.nu;
  j["loglik"] = f.loglik;
  j["aic"] = f.aic;
  j["n_obs"] = f.n_obs;
}

void from_json(const Json& j, JointCopulaFit& f) {
  f.family = joint_family_from_string(get<std::string>(j, "family"));
  const auto rows = get<std::vector<std::vector<double>>>(j, "corr");
  const auto d = static_cast<Eigen::Index>(rows.size());
  f.corr.resize(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != d) throw InputError("JSON: correlation matrix is not square");
    for (Eigen::Index c = 0; c < d; ++c) f.corr(r, c) = rows[r][c];
  }
  f.nu = f.family == JointFamily::StudentT ? get<double>(j, "nu") : 0.0;
  f.loglik = get<double>(j, "loglik");
  f.aic = get<double>(j, "aic");
  f.n_obs = j.value("n_obs", std::size_t{0});
  f.validate();
}

void to_json(Json& j, const CVineModel& m) {
  Json pairs = Json::array();
  for (std::size_t t = 0; t < m.pairs.size(); ++t) {
    for (std::size_t k = 0; k < m.pairs[t].size(); ++k) {
      Json p = m.pairs[t][k];
      p["tree"] = t;
      p["offset"] = k + 1;
      pairs.push_back(p);
    }
  }
  j = Json{{"schema_version", kSchemaVersion}, {"ordering", m.ordering}, {"pairs", pairs}};
}

void from_json(const Json& j, CVineModel& m) {
  m.ordering = get<std::vector<std::size_t>>(j, "ordering");
  const std::size_t n = m.ordering.size();
  m.pairs.assign(n > 0 ? n - 1 : 0, {});
  for (std::size_t t = 0; t + 1 < n; ++t) m.pairs[t].resize(n - 1 - t);
  for (const auto& p : j.at("pairs")) {
    const auto t = get<std::size_t>(p, "tree");
    const auto k = get<std::size_t>(p, "offset");
    if (t >= m.pairs.size() || k < 1 || k > m.pairs[t].size()) throw InputError("JSON: vine pair index out of range");
    m.pairs[t][k - 1] = p.get<BivariateCopulaFit>();
  }
  m.validate();
}

void to_json(Json& j, const CdcvConfig& c) {
  const char* kinds[] = {"ClusterCount", "DistanceThreshold", "None"};
  Json families = Json::array();
  for (auto f : c.families.members()) families.push_back(to_string(f));
  j = Json{
      {"clustering",
       {{"metric", to_string(c.clustering.metric)},
        {"linkage", to_string(c.clustering.linkage)},
        {"a", c.clustering.max_size ? Json(*c.clustering.max_size) : Json(nullptr)},
        {"stop",
         {{"kind", kinds[static_cast<int>(c.clustering.stop.kind)]},
          {"clusters", c.clustering.stop.clusters},
          {"threshold", c.clustering.stop.threshold}}}}},
      {"index",
       {{"rule", to_string(c.index.rule)},
        {"upsilon", c.index.upsilon},
        {"market_source", to_string(c.index.market_source)},
        {"severity", c.index.severity},
        {"market_caps", c.index.market_caps}}},
      {"families", families},
      {"joint_student", c.joint_student},
      {"seed", c.seed},
      {"fixed_labels", c.fixed_labels ? Json(*c.fixed_labels) : Json(nullptr)},
      {"sampling", to_string(c.sampling)}};
}

void from_json(const Json& j, CdcvConfig& c) {
  c = {};
  const Json& cl = j.at("clustering");
  c.clustering.metric = distance_metric_from_string(get<std::string>(cl, "metric"));
  c.clustering.linkage = linkage_from_string(get<std::string>(cl, "linkage"));
  if (cl.contains("a") && !cl.at("a").is_null()) c.clustering.max_size = cl.at("a").get<std::size_t>();
  const Json& st = cl.at("stop");
  const auto kind = get<std::string>(st, "kind");
  if (kind == "ClusterCount") c.clustering.stop.kind = StoppingRule::Kind::ClusterCount;
  else if (kind == "DistanceThreshold") c.clustering.stop.kind = StoppingRule::Kind::DistanceThreshold;
  else if (kind == "None") c.clustering.stop.kind = StoppingRule::Kind::None;
  else throw InputError("JSON: unknown stopping rule '" + kind + "'");
  c.clustering.stop.clusters = get<std::size_t>(st, "clusters");
  c.clustering.stop.threshold = get<double>(st, "threshold");
  const Json& ix = j.at("index");
  c.index.rule = index_rule_from_string(get<std::string>(ix, "rule"));
  c.index.upsilon = get<double>(ix, "upsilon");
  c.index.market_source = market_source_from_string(get<std::string>(ix, "market_source"));
  c.index.severity = get<double>(ix, "severity");
  c.index.market_caps = get<std::vector<double>>(ix, "market_caps");
  std::vector<BicopFamily> fams;
  for (const auto& f : j.at("families")) fams.push_back(bicop_family_from_string(f.get<std::string>()));
  c.families = FamilySet(std::span<const BicopFamily>(fams));
  c.joint_student = get<bool>(j, "joint_student");
  c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("fixed_labels") && !j.at("fixed_labels").is_null()) {
    c.fixed_labels = j.at("fixed_labels").get<std::map<std::string, std::string>>();
  }
  c.sampling = index_sampling_from_string(get<std::string>(j, "sampling"));
}

void to_json(Json& j, const CdcvModel& m) {
  Json clusters = Json::array();
  for (const auto& c : m.clusters) {
    Json assets = Json::array();
    for (const auto& a : c.assets) {
      assets.push_back({{"asset", m.assets[a.column]}, {"column", a.column}, {"pi", a.pi}, {"omega", a.omega}});
    }
    clusters.push_back({{"index", c.index}, {"marginal", c.marginal}, {"lambda", c.lambda}, {"assets", assets}});
  }
  j = Json{{"schema_version", kSchemaVersion},
           {"assets", m.assets},
           {"window_start", m.window_start},
           {"config", m.config},
           {"partition", m.partition},
           {"market", {{"index", m.market}, {"marginal", m.market_marginal}}},
           {"clusters", clusters},
           {"asset_marginals", m.asset_marginals},
           {"joint", m.joint}};
}

void from_json(const Json& j, CdcvModel& m) {
  const int version = get<int>(j, "schema_version");
  if (version != kSchemaVersion) throw InputError("model JSON: unsupported schema_version " + std::to_string(version));
  m = {};
  m.assets = get<std::vector<std::string>>(j, "assets");
  m.window_start = get<std::size_t>(j, "window_start");
  m.config = j.at("config").get<CdcvConfig>();
  m.partition = j.at("partition").get<ClusterPartition>();
  m.market = j.at("market").at("index").get<IndexSeries>();
  m.market_marginal = j.at("market").at("marginal").get<MarginalFit>();
  for (const auto& cj : j.at("clusters")) {
    ClusterFit c;
    c.index = cj.at("index").get<IndexSeries>();
    c.marginal = cj.at("marginal").get<MarginalFit>();
    c.lambda = cj.at("lambda").get<BivariateCopulaFit>();
    for (const auto& aj : cj.at("assets")) {
      AssetFit a;
      a.column = get<std::size_t>(aj, "column");
      a.pi = aj.at("pi").get<BivariateCopulaFit>();
      a.omega = aj.at("omega").get<BivariateCopulaFit>();
      c.assets.push_back(std::move(a));
    }
    m.clusters.push_back(std::move(c));
  }
  m.asset_marginals = get<std::vector<MarginalFit>>(j, "asset_marginals");
  m.joint = j.at("joint").get<JointCopulaFit>();
}

void to_json(Json& j, const RhoSummary& s) {
  j = Json{{"mean", s.mean}, {"std", s.std}, {"q1", s.q1}, {"q25", s.q25},
           {"q50", s.q50},   {"q75", s.q75}, {"q99", s.q99}};
}

void to_json(Json& j, const ConditioningDiagnostics& d) {
  j = Json{{"stage", to_string(d.stage)}, {"pairs", d.rho.size()}, {"summary", d.summary}, {"abs_summary", d.abs_summary}};
}

void to_json(Json& j, const VaRBacktestReport& r) {
  j = Json{{"mode", to_string(r.mode)}, {"alpha", r.alpha},       {"var", r.var_mean},
           {"hits", r.hits},            {"trials", r.trials},     {"hit_rate", r.hit_rate},
           {"lr_pof", r.lr},            {"p_value", r.p_value},   {"reject_95", r.reject_95},
           {"reject_99", r.reject_99}};
}

void to_json(Json& j, const SelectionRow& r) {
  Json counts = Json::object(), pct = Json::object();
  for (const auto& [f, k] : r.counts) {
    counts[std::string(short_label(f))] = k;
    pct[std::string(short_label(f))] = r.percent(f);
  }
  j = Json{{"root", to_string(r.root)}, {"total", r.total}, {"counts", counts}, {"percent", pct}};
}

CdcvModel model_from_json(const Json& j) {
  CdcvModel m;
  try {
    m = j.get<CdcvModel>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model JSON: ") + e.what());
  }
  m.validate();
  return m;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace cdcv
