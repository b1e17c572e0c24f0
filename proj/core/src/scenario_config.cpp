#include "oppfl/scenario_config.hpp"

#include <fstream>

#include "oppfl/errors.hpp"

namespace oppfl {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

std::vector<int> get_int_list(const json& obj, const char* key, std::vector<int> fallback,
                              const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

DatasetSpecConfig parse_dataset(const json& obj) {
  reject_unknown_keys(obj,
                      {"kind", "num_labels", "per_label", "test_per_label", "input_dim",
                       "spread", "images", "labels", "test_images", "test_labels"},
                      "dataset");
  DatasetSpecConfig ds;
  const std::string kind = get_or<std::string>(obj, "kind", "synthetic", "dataset");
  if (kind == "synthetic") {
    ds.kind = DatasetSpecConfig::Kind::Synthetic;
  } else if (kind == "idx") {
    ds.kind = DatasetSpecConfig::Kind::Idx;
  } else {
    throw ConfigError("dataset.kind must be \"synthetic\" or \"idx\"");
  }
  ds.num_labels = get_or(obj, "num_labels", ds.num_labels, "dataset");
  ds.per_label = get_or(obj, "per_label", ds.per_label, "dataset");
  ds.test_per_label = get_or(obj, "test_per_label", ds.test_per_label, "dataset");
  ds.input_dim = get_or(obj, "input_dim", ds.input_dim, "dataset");
  ds.spread = get_or(obj, "spread", ds.spread, "dataset");
  ds.images = get_or<std::string>(obj, "images", "", "dataset");
  ds.labels = get_or<std::string>(obj, "labels", "", "dataset");
  ds.test_images = get_or<std::string>(obj, "test_images", "", "dataset");
  ds.test_labels = get_or<std::string>(obj, "test_labels", "", "dataset");
  if (ds.kind == DatasetSpecConfig::Kind::Idx &&
      (ds.images.empty() || ds.labels.empty() || ds.test_images.empty() ||
       ds.test_labels.empty()))
    throw ConfigError("dataset.kind \"idx\" needs images/labels/test_images/test_labels");
  if (ds.num_labels < 1 || ds.per_label < 1 || ds.test_per_label < 1 || ds.input_dim < 1)
    throw ConfigError("dataset counts must be >= 1");
  if (ds.spread < 0.0) throw ConfigError("dataset.spread must be >= 0");
  return ds;
}

MlpArchitecture parse_arch(const json& obj) {
  reject_unknown_keys(obj, {"input_dim", "hidden_dims", "output_dim"}, "architecture");
  MlpArchitecture arch;
  arch.input_dim = get_or(obj, "input_dim", 16, "architecture");
  arch.hidden_dims = get_int_list(obj, "hidden_dims", {64, 64}, "architecture");
  arch.output_dim = get_or(obj, "output_dim", 10, "architecture");
  try {
    arch.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("architecture: ") + e.what());
  }
  return arch;
}

std::vector<PhaseSpec> parse_phases(const json& arr) {
  std::vector<PhaseSpec> phases;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& obj = arr.at(i);
    const std::string where = "controlled.phases[" + std::to_string(i) + "]";
    reject_unknown_keys(obj, {"count", "fixed_labels", "fixed_fraction", "random_label_count"},
                        where);
    PhaseSpec phase;
    phase.count = get_or(obj, "count", 100, where);
    phase.fixed_labels = get_int_list(obj, "fixed_labels", {}, where);
    phase.fixed_fraction = get_or(obj, "fixed_fraction", 0.5, where);
    phase.random_label_count = get_or(obj, "random_label_count", 3, where);
    phases.push_back(std::move(phase));
  }
  return phases;
}

}  // namespace

Scenario parse_scenario(const json& config) {
  if (!config.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown_keys(config,
                      {"schema_version", "kind", "seed", "workers", "dataset", "architecture",
                       "hyper", "strategy", "link", "compute", "bootstrap",
                       "gamma_subsumption", "evaluation", "controlled", "mobility", "tune"},
                      "config");

  const int version = get_or(config, "schema_version", -1, "config");
  if (version != kConfigSchemaVersion)
    throw ConfigError("schema_version must be " + std::to_string(kConfigSchemaVersion));

  Scenario s;
  const std::string kind = get_or<std::string>(config, "kind", "controlled", "config");
  if (kind == "controlled") {
    s.kind = Scenario::Kind::Controlled;
  } else if (kind == "mobility") {
    s.kind = Scenario::Kind::Mobility;
  } else {
    throw ConfigError("kind must be \"controlled\" or \"mobility\"");
  }
  s.seed = get_or<std::uint64_t>(config, "seed", 1, "config");
  s.workers = get_or(config, "workers", 1, "config");
  if (s.workers < 1) throw ConfigError("workers must be >= 1");

  if (config.contains("dataset")) s.dataset = parse_dataset(config.at("dataset"));
  if (config.contains("architecture")) s.arch = parse_arch(config.at("architecture"));

  if (config.contains("hyper")) {
    const json& h = config.at("hyper");
    reject_unknown_keys(h, {"eta", "lambda", "tau", "rho", "kappa", "phi"}, "hyper");
    s.hyper.eta = get_or(h, "eta", s.hyper.eta, "hyper");
    s.hyper.lambda = get_or(h, "lambda", s.hyper.lambda, "hyper");
    s.hyper.tau = get_or(h, "tau", s.hyper.tau, "hyper");
    s.hyper.rho = get_or(h, "rho", s.hyper.rho, "hyper");
    s.kappa = get_or(h, "kappa", s.kappa, "hyper");
    s.phi = get_or(h, "phi", s.phi, "hyper");
    if (!(s.hyper.eta >= 0.0)) throw ConfigError("hyper.eta must be >= 0");
    if (!(s.hyper.lambda > 0.0)) throw ConfigError("hyper.lambda must be > 0");
    if (!(s.hyper.tau >= 0.0)) throw ConfigError("hyper.tau must be >= 0");
    if (s.hyper.rho < 1) throw ConfigError("hyper.rho must be >= 1");
    if (!(s.kappa > 0.0) || !(s.phi > 0.0))
      throw ConfigError("hyper.kappa and hyper.phi must be > 0");
  }

  try {
    s.strategy = strategy_from_string(
        get_or<std::string>(config, "strategy", "opportunistic-momentum", "config"));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  if (config.contains("link")) {
    const json& l = config.at("link");
    reject_unknown_keys(l, {"name", "datarate_bps", "t_send_override_s"}, "link");
    s.link.name = get_or<std::string>(l, "name", s.link.name, "link");
    s.link.datarate_bps = get_or(l, "datarate_bps", s.link.datarate_bps, "link");
    if (l.contains("t_send_override_s"))
      s.link.t_send_override_s = l.at("t_send_override_s").get<double>();
    if (!(s.link.datarate_bps > 0.0)) throw ConfigError("link.datarate_bps must be > 0");
  }
  if (config.contains("compute")) {
    const json& c = config.at("compute");
    reject_unknown_keys(c, {"name", "t_train_s", "t_agg_worst_s"}, "compute");
    s.compute.name = get_or<std::string>(c, "name", s.compute.name, "compute");
    s.compute.t_train_s = get_or(c, "t_train_s", s.compute.t_train_s, "compute");
    s.compute.t_agg_worst_s = get_or(c, "t_agg_worst_s", s.compute.t_agg_worst_s, "compute");
    if (s.compute.t_train_s < 0.0 || s.compute.t_agg_worst_s < 0.0)
      throw ConfigError("compute costs must be >= 0");
  }
  if (config.contains("bootstrap")) {
    const json& b = config.at("bootstrap");
    reject_unknown_keys(b, {"fraction", "epochs", "eta"}, "bootstrap");
    s.bootstrap.fraction = get_or(b, "fraction", s.bootstrap.fraction, "bootstrap");
    s.bootstrap.epochs = get_or(b, "epochs", s.bootstrap.epochs, "bootstrap");
    s.bootstrap.eta = get_or(b, "eta", s.bootstrap.eta, "bootstrap");
    if (s.bootstrap.fraction < 0.0 || s.bootstrap.fraction > 1.0)
      throw ConfigError("bootstrap.fraction must lie in [0,1]");
    if (s.bootstrap.epochs < 0) throw ConfigError("bootstrap.epochs must be >= 0");
    if (!(s.bootstrap.eta >= 0.0)) throw ConfigError("bootstrap.eta must be >= 0");
  }
  s.gamma_subsumption = get_or(config, "gamma_subsumption", false, "config");

  if (config.contains("evaluation")) {
    const json& e = config.at("evaluation");
    reject_unknown_keys(e, {"test_size", "interval_s"}, "evaluation");
    s.evaluation.test_size =
        get_or<std::size_t>(e, "test_size", s.evaluation.test_size, "evaluation");
    s.evaluation.interval_s = get_or(e, "interval_s", s.evaluation.interval_s, "evaluation");
    if (s.evaluation.test_size == 0) throw ConfigError("evaluation.test_size must be >= 1");
    if (!(s.evaluation.interval_s > 0.0))
      throw ConfigError("evaluation.interval_s must be > 0");
  }

  if (config.contains("controlled")) {
    const json& c = config.at("controlled");
    reject_unknown_keys(c, {"phases", "learner_labels", "goal_labels", "local_set_size"},
                        "controlled");
    if (c.contains("phases")) s.controlled.phases = parse_phases(c.at("phases"));
    s.controlled.learner_labels =
        get_int_list(c, "learner_labels", s.controlled.learner_labels, "controlled");
    s.controlled.goal_labels =
        get_int_list(c, "goal_labels", s.controlled.goal_labels, "controlled");
    s.controlled.local_set_size =
        get_or<std::size_t>(c, "local_set_size", s.controlled.local_set_size, "controlled");
    if (s.controlled.local_set_size == 0)
      throw ConfigError("controlled.local_set_size must be >= 1");
  }

  if (config.contains("mobility")) {
    const json& m = config.at("mobility");
    reject_unknown_keys(m,
                        {"arena_side", "comm_range", "tick_s", "speed", "flight_exponent",
                         "flight_cap", "pause_exponent", "pause_cap", "devices_per_region",
                         "episodes", "episode_ticks", "local_set_size", "goal_extra_labels"},
                        "mobility");
    auto& mob = s.mobility;
    mob.arena.side_length = get_or(m, "arena_side", mob.arena.side_length, "mobility");
    mob.arena.comm_range = get_or(m, "comm_range", mob.arena.comm_range, "mobility");
    mob.arena.tick_seconds = get_or(m, "tick_s", mob.arena.tick_seconds, "mobility");
    mob.levy.speed = get_or(m, "speed", mob.levy.speed, "mobility");
    mob.levy.flight_exponent = get_or(m, "flight_exponent", mob.levy.flight_exponent, "mobility");
    mob.levy.flight_cap = get_or(m, "flight_cap", mob.levy.flight_cap, "mobility");
    mob.levy.pause_exponent = get_or(m, "pause_exponent", mob.levy.pause_exponent, "mobility");
    mob.levy.pause_cap = get_or(m, "pause_cap", mob.levy.pause_cap, "mobility");
    mob.devices_per_region = get_or(m, "devices_per_region", mob.devices_per_region, "mobility");
    mob.episodes = get_or(m, "episodes", mob.episodes, "mobility");
    mob.episode_ticks = get_or<long>(m, "episode_ticks", mob.episode_ticks, "mobility");
    mob.local_set_size =
        get_or<std::size_t>(m, "local_set_size", mob.local_set_size, "mobility");
    mob.goal_extra_labels = get_or(m, "goal_extra_labels", mob.goal_extra_labels, "mobility");
    try {
      mob.arena.validate();
      mob.levy.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("mobility: ") + e.what());
    }
    if (mob.devices_per_region < 1 || mob.episodes < 1 || mob.episode_ticks < 1)
      throw ConfigError("mobility counts must be >= 1");
    if (mob.local_set_size == 0) throw ConfigError("mobility.local_set_size must be >= 1");
    if (mob.goal_extra_labels < 0) throw ConfigError("mobility.goal_extra_labels must be >= 0");
  }

  if (config.contains("tune")) {
    const json& t = config.at("tune");
    reject_unknown_keys(t, {"etas", "lambdas", "kappas", "phis"}, "tune");
  }
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  return parse_scenario(config);
}

TuneGrid parse_tune_grid(const json& config) {
  TuneGrid grid;
  if (!config.contains("tune")) return grid;
  const json& t = config.at("tune");
  if (t.contains("etas")) grid.etas = t.at("etas").get<std::vector<double>>();
  if (t.contains("lambdas")) grid.lambdas = t.at("lambdas").get<std::vector<double>>();
  if (t.contains("kappas")) grid.kappas = t.at("kappas").get<std::vector<double>>();
  if (t.contains("phis")) grid.phis = t.at("phis").get<std::vector<double>>();
  if (grid.etas.empty() || grid.lambdas.empty() || grid.kappas.empty() || grid.phis.empty())
    throw ConfigError("tune grid lists must not be empty");
  return grid;
}

json scenario_to_json(const Scenario& s) {
  json config;
  config["schema_version"] = kConfigSchemaVersion;
  config["kind"] = s.kind == Scenario::Kind::Controlled ? "controlled" : "mobility";
  config["seed"] = s.seed;
  config["workers"] = s.workers;

  json ds;
  ds["kind"] = s.dataset.kind == DatasetSpecConfig::Kind::Synthetic ? "synthetic" : "idx";
  if (s.dataset.kind == DatasetSpecConfig::Kind::Synthetic) {
    ds["num_labels"] = s.dataset.num_labels;
    ds["per_label"] = s.dataset.per_label;
    ds["test_per_label"] = s.dataset.test_per_label;
    ds["input_dim"] = s.dataset.input_dim;
    ds["spread"] = s.dataset.spread;
  } else {
    ds["images"] = s.dataset.images;
    ds["labels"] = s.dataset.labels;
    ds["test_images"] = s.dataset.test_images;
    ds["test_labels"] = s.dataset.test_labels;
  }
  config["dataset"] = ds;

  config["architecture"] = {{"input_dim", s.arch.input_dim},
                            {"hidden_dims", s.arch.hidden_dims},
                            {"output_dim", s.arch.output_dim}};
  config["hyper"] = {{"eta", s.hyper.eta},   {"lambda", s.hyper.lambda},
                     {"tau", s.hyper.tau},   {"rho", s.hyper.rho},
                     {"kappa", s.kappa},     {"phi", s.phi}};
  config["strategy"] = to_string(s.strategy);
  json link = {{"name", s.link.name}, {"datarate_bps", s.link.datarate_bps}};
  if (s.link.t_send_override_s) link["t_send_override_s"] = *s.link.t_send_override_s;
  config["link"] = link;
  config["compute"] = {{"name", s.compute.name},
                       {"t_train_s", s.compute.t_train_s},
                       {"t_agg_worst_s", s.compute.t_agg_worst_s}};
  config["bootstrap"] = {{"fraction", s.bootstrap.fraction},
                         {"epochs", s.bootstrap.epochs},
                         {"eta", s.bootstrap.eta}};
  config["gamma_subsumption"] = s.gamma_subsumption;
  config["evaluation"] = {{"test_size", s.evaluation.test_size},
                          {"interval_s", s.evaluation.interval_s}};

  if (s.kind == Scenario::Kind::Controlled) {
    json phases = json::array();
    for (const auto& p :
         (s.controlled.phases.empty() ? default_controlled_phases() : s.controlled.phases))
      phases.push_back({{"count", p.count},
                        {"fixed_labels", p.fixed_labels},
                        {"fixed_fraction", p.fixed_fraction},
                        {"random_label_count", p.random_label_count}});
    config["controlled"] = {{"phases", phases},
                            {"learner_labels", s.controlled.learner_labels},
                            {"goal_labels", s.controlled.goal_labels},
                            {"local_set_size", s.controlled.local_set_size}};
  } else {
    config["mobility"] = {{"arena_side", s.mobility.arena.side_length},
                          {"comm_range", s.mobility.arena.comm_range},
                          {"tick_s", s.mobility.arena.tick_seconds},
                          {"speed", s.mobility.levy.speed},
                          {"flight_exponent", s.mobility.levy.flight_exponent},
                          {"flight_cap", s.mobility.levy.flight_cap},
                          {"pause_exponent", s.mobility.levy.pause_exponent},
                          {"pause_cap", s.mobility.levy.pause_cap},
                          {"devices_per_region", s.mobility.devices_per_region},
                          {"episodes", s.mobility.episodes},
                          {"episode_ticks", s.mobility.episode_ticks},
                          {"local_set_size", s.mobility.local_set_size},
                          {"goal_extra_labels", s.mobility.goal_extra_labels}};
  }
  return config;
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set expects key.path=value, got \"" + assignment + "\"");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // bare strings pass through
  }

  json* node = &config;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot - begin);
    if (key.empty()) throw ConfigError("--set path has an empty segment: " + path);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    begin = dot + 1;
  }
}

std::string scenario_hash(const json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : dump) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace oppfl
