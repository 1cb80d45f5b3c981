#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wupd/error.hpp"
#include "wupd/families.hpp"
#include "wupd/fit.hpp"
#include "wupd/updating.hpp"

namespace wupd {

using Json = nlohmann::json;

/// Named weight schedules w(t), t = number of observations consumed (or the
/// observation index j for per-observation likelihood weights):
///   constant:        value
///   linear_in_t:     intercept + slope * t
///   reciprocal_in_t: intercept + scale / (t + 1)
struct NamedSchedule {
  enum class Kind { Constant, LinearInT, ReciprocalInT } kind = Kind::Constant;
  double a = 1.0;  ///< value or intercept
  double b = 0.0;  ///< slope or scale

  double operator()(std::size_t t) const {
    const double x = static_cast<double>(t);
    switch (kind) {
      case Kind::Constant: return a;
      case Kind::LinearInT: return a + b * x;
      case Kind::ReciprocalInT: return a + b / (x + 1.0);
    }
    return a;
  }
};

using AlphaSpec = std::variant<double, NamedSchedule>;
using BetaSpec = std::variant<double, std::vector<double>, NamedSchedule>;

enum class UpdateForm { Discrimination, TimeVarying };

struct WeightsConfig {
  AlphaSpec alpha = 1.0;
  BetaSpec betas = 1.0;
  UpdateForm form = UpdateForm::Discrimination;
};

struct BernoulliGenerator {
  double theta;
  std::size_t count;
  std::uint64_t seed;
};

struct NormalGenerator {
  double mean;
  double variance;
  std::size_t count;
  std::uint64_t seed;
};

using ObservationSource = std::variant<std::vector<Observation>, BernoulliGenerator, NormalGenerator>;

enum class GridKind { Default, Uniform, Sine, Counting };

struct GridConfig {
  std::optional<std::size_t> points;
  GridKind kind = GridKind::Default;
  std::optional<double> lower;
  std::optional<double> upper;
  double epsilon = 1e-6;
};

struct OutputConfig {
  std::optional<std::string> csv;
  std::optional<std::string> json;
};

struct ScenarioConfig {
  AnalyticFamily prior = Beta{1.0, 1.0};
  LikelihoodSpec likelihood = BernoulliLikelihood{};
  WeightsConfig weights;
  ObservationSource observations = std::vector<Observation>{};
  GridConfig grid;
  OutputConfig outputs;
};

/// Density given by a family, explicit values, or a power of the first density.
struct DensitySpec {
  std::variant<AnalyticFamily, std::vector<double>, double> source;  ///< double = power of g
};

struct AnalyzeConfig {
  GridConfig grid;
  DensitySpec g;
  DensitySpec gamma;
  std::optional<double> r;
  OutputConfig outputs;
};

struct FitInput {
  FitData data;
  std::optional<SearchBox> box;
};

/// Strict reader: every access records its JSON path so errors name the field,
/// and unknown keys are rejected.
class JsonReader {
 public:
  JsonReader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorKind::ConfigInvalid, path_ + ": " + message);
  }

  const Json& node() const noexcept { return node_; }
  const std::string& path() const noexcept { return path_; }

  void require_object() const {
    if (!node_.is_object()) fail("expected an object");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    require_object();
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      bool known = false;
      for (const char* k : keys) known = known || it.key() == k;
      if (!known) JsonReader(*it, child_path(it.key())).fail("unknown key");
    }
  }

  bool has(const char* key) const { return node_.is_object() && node_.contains(key); }

  JsonReader at(const char* key) const {
    require_object();
    if (!node_.contains(key)) JsonReader(node_, child_path(key)).fail("missing required field");
    return JsonReader(node_.at(key), child_path(key));
  }

  JsonReader at(std::size_t i) const {
    return JsonReader(node_.at(i), path_ + "[" + std::to_string(i) + "]");
  }

  double number() const {
    if (!node_.is_number()) fail("expected a number");
    const double v = node_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be positive");
    return v;
  }

  std::uint64_t unsigned_integer() const {
    if (!node_.is_number_unsigned() && !(node_.is_number_integer() && node_.get<long long>() >= 0)) {
      fail("expected a non-negative integer");
    }
    return node_.get<std::uint64_t>();
  }

  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }

  std::vector<double> numbers() const {
    if (!node_.is_array()) fail("expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < node_.size(); ++i) out.push_back(at(i).number());
    return out;
  }

 private:
  std::string child_path(const std::string& key) const { return path_ + "." + key; }

  const Json& node_;
  std::string path_;
};

namespace config_detail {

inline AnalyticFamily parse_family(const JsonReader& r) {
  const std::string family = r.at("family").string();
  AnalyticFamily out;
  if (family == "beta") {
    r.allow_only({"family", "a", "b"});
    out = Beta{r.at("a").positive(), r.at("b").positive()};
  } else if (family == "normal") {
    r.allow_only({"family", "mean", "variance"});
    out = NormalKnownVar{r.at("mean").number(), r.at("variance").positive()};
  } else if (family == "pareto") {
    r.allow_only({"family", "p"});
    const double p = r.at("p").number();
    if (!(p > 1.0)) r.at("p").fail("Pareto needs p > 1");
    out = Pareto{p};
  } else {
    r.at("family").fail("unknown family '" + family + "' (beta, normal, pareto)");
  }
  return out;
}

inline LikelihoodSpec parse_likelihood(const JsonReader& r) {
  const std::string family = r.at("family").string();
  if (family == "bernoulli") {
    r.allow_only({"family"});
    return BernoulliLikelihood{};
  }
  if (family == "normal") {
    r.allow_only({"family", "variance"});
    return NormalLikelihood{r.at("variance").positive()};
  }
  r.at("family").fail("unknown likelihood '" + family + "' (bernoulli, normal)");
}

inline NamedSchedule parse_schedule(const JsonReader& r) {
  const std::string name = r.at("schedule").string();
  NamedSchedule s;
  if (name == "constant") {
    r.allow_only({"schedule", "value"});
    s = {NamedSchedule::Kind::Constant, r.at("value").positive(), 0.0};
  } else if (name == "linear_in_t") {
    r.allow_only({"schedule", "intercept", "slope"});
    s = {NamedSchedule::Kind::LinearInT, r.at("intercept").number(), r.at("slope").number()};
  } else if (name == "reciprocal_in_t") {
    r.allow_only({"schedule", "intercept", "scale"});
    s = {NamedSchedule::Kind::ReciprocalInT, r.at("intercept").number(), r.at("scale").number()};
  } else {
    r.at("schedule").fail("unknown schedule '" + name +
                          "' (constant, linear_in_t, reciprocal_in_t)");
  }
  if (!(s(0) > 0.0)) r.fail("schedule must be positive at t = 0");
  return s;
}

inline WeightsConfig parse_weights(const JsonReader& r) {
  r.allow_only({"alpha", "betas", "form"});
  WeightsConfig w;
  if (r.has("alpha")) {
    const auto a = r.at("alpha");
    if (a.node().is_object()) {
      w.alpha = parse_schedule(a);
    } else {
      w.alpha = a.positive();
    }
  }
  if (r.has("betas")) {
    const auto b = r.at("betas");
    if (b.node().is_object()) {
      w.betas = parse_schedule(b);
    } else if (b.node().is_array()) {
      auto list = b.numbers();
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (!(list[i] > 0.0)) b.at(i).fail("must be positive");
      }
      w.betas = std::move(list);
    } else {
      w.betas = b.positive();
    }
  }
  if (r.has("form")) {
    const std::string form = r.at("form").string();
    if (form == "discrimination") {
      w.form = UpdateForm::Discrimination;
    } else if (form == "time_varying") {
      w.form = UpdateForm::TimeVarying;
    } else {
      r.at("form").fail("expected 'discrimination' or 'time_varying'");
    }
  }
  if (w.form == UpdateForm::Discrimination && std::holds_alternative<NamedSchedule>(w.alpha) &&
      std::get<NamedSchedule>(w.alpha).kind != NamedSchedule::Kind::Constant) {
    r.at("alpha").fail("a time-dependent prior weight needs \"form\": \"time_varying\"");
  }
  if (w.form == UpdateForm::TimeVarying && std::holds_alternative<std::vector<double>>(w.betas)) {
    r.at("betas").fail("the time-varying form takes a scalar or a schedule, not a list");
  }
  return w;
}

inline ObservationSource parse_observations(const JsonReader& r) {
  if (r.node().is_array()) return r.numbers();
  const std::string gen = r.at("generator").string();
  const auto count = static_cast<std::size_t>(r.at("count").unsigned_integer());
  if (!r.has("seed")) r.fail("a generator needs a seed");
  const std::uint64_t seed = r.at("seed").unsigned_integer();
  if (gen == "bernoulli") {
    r.allow_only({"generator", "theta", "count", "seed"});
    const double theta = r.at("theta").number();
    if (!(theta >= 0.0 && theta <= 1.0)) r.at("theta").fail("must lie in [0, 1]");
    return BernoulliGenerator{theta, count, seed};
  }
  if (gen == "normal") {
    r.allow_only({"generator", "mean", "variance", "count", "seed"});
    return NormalGenerator{r.at("mean").number(), r.at("variance").positive(), count, seed};
  }
  r.at("generator").fail("unknown generator '" + gen + "' (bernoulli, normal)");
}

inline GridConfig parse_grid(const JsonReader& r) {
  r.allow_only({"points", "kind", "lower", "upper", "epsilon"});
  GridConfig g;
  if (r.has("points")) {
    const auto n = r.at("points").unsigned_integer();
    if (n < 2) r.at("points").fail("need at least 2 points");
    g.points = static_cast<std::size_t>(n);
  }
  if (r.has("kind")) {
    const std::string kind = r.at("kind").string();
    if (kind == "uniform") {
      g.kind = GridKind::Uniform;
    } else if (kind == "sine") {
      g.kind = GridKind::Sine;
    } else if (kind == "counting") {
      g.kind = GridKind::Counting;
    } else {
      r.at("kind").fail("expected 'uniform', 'sine' or 'counting'");
    }
  }
  if (r.has("lower")) g.lower = r.at("lower").number();
  if (r.has("upper")) g.upper = r.at("upper").number();
  if (r.has("epsilon")) {
    g.epsilon = r.at("epsilon").positive();
    if (!(g.epsilon < 0.5)) r.at("epsilon").fail("must be below 0.5");
  }
  return g;
}

inline OutputConfig parse_outputs(const JsonReader& r, std::initializer_list<const char*> keys) {
  r.allow_only(keys);
  OutputConfig o;
  if (r.has("csv")) o.csv = r.at("csv").string();
  if (r.has("json")) o.json = r.at("json").string();
  return o;
}

inline DensitySpec parse_density(const JsonReader& r, bool allow_power) {
  r.require_object();
  if (r.has("values")) {
    r.allow_only({"values"});
    auto values = r.at("values").numbers();
    if (values.size() < 2) r.at("values").fail("need at least 2 values");
    return {std::move(values)};
  }
  if (r.has("power_of_g")) {
    if (!allow_power) r.at("power_of_g").fail("only Gamma may be defined as a power of g");
    r.allow_only({"power_of_g"});
    return {r.at("power_of_g").positive()};
  }
  return {parse_family(r)};
}

}  // namespace config_detail

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ConfigInvalid, path + ": " + e.what());
  }
}

inline ScenarioConfig parse_scenario(const Json& doc) {
  const JsonReader r(doc, "$");
  r.allow_only({"prior", "likelihood", "weights", "observations", "grid", "outputs"});
  ScenarioConfig c;
  c.prior = config_detail::parse_family(r.at("prior"));
  c.likelihood = config_detail::parse_likelihood(r.at("likelihood"));
  if (r.has("weights")) c.weights = config_detail::parse_weights(r.at("weights"));
  if (r.has("observations")) c.observations = config_detail::parse_observations(r.at("observations"));
  if (r.has("grid")) c.grid = config_detail::parse_grid(r.at("grid"));
  if (r.has("outputs")) c.outputs = config_detail::parse_outputs(r.at("outputs"), {"csv", "json"});
  return c;
}

inline AnalyzeConfig parse_analyze(const Json& doc) {
  const JsonReader r(doc, "$");
  r.allow_only({"grid", "g", "Gamma", "r", "outputs"});
  AnalyzeConfig c;
  if (r.has("grid")) c.grid = config_detail::parse_grid(r.at("grid"));
  c.g = config_detail::parse_density(r.at("g"), false);
  c.gamma = config_detail::parse_density(r.at("Gamma"), true);
  if (r.has("r")) c.r = r.at("r").positive();
  if (r.has("outputs")) c.outputs = config_detail::parse_outputs(r.at("outputs"), {"json"});
  return c;
}

/// Fit input: prior, likelihood, observations and belief reports.
///   "reports": {"kind": "point_beliefs" | "posterior_draws",
///               "values": [[step, value], ...]}
inline FitInput parse_fit_input(const Json& doc) {
  const JsonReader r(doc, "$");
  r.allow_only({"prior", "likelihood", "observations", "reports", "search_box"});
  FitInput in{FitData{config_detail::parse_family(r.at("prior")),
                      config_detail::parse_likelihood(r.at("likelihood")),
                      r.at("observations").numbers(), ReportKind::PointBeliefs, {}},
              std::nullopt};
  const auto reports = r.at("reports");
  reports.allow_only({"kind", "values"});
  const std::string kind = reports.at("kind").string();
  if (kind == "point_beliefs") {
    in.data.kind = ReportKind::PointBeliefs;
  } else if (kind == "posterior_draws") {
    in.data.kind = ReportKind::PosteriorDraws;
  } else {
    reports.at("kind").fail("expected 'point_beliefs' or 'posterior_draws'");
  }
  const auto values = reports.at("values");
  if (!values.node().is_array()) values.fail("expected an array of [step, value] pairs");
  for (std::size_t i = 0; i < values.node().size(); ++i) {
    const auto pair = values.at(i);
    if (!pair.node().is_array() || pair.node().size() != 2) pair.fail("expected [step, value]");
    in.data.reports.push_back(
        {static_cast<std::size_t>(pair.at(std::size_t{0}).unsigned_integer()), pair.at(1).number()});
  }
  if (r.has("search_box")) {
    const auto box = r.at("search_box");
    box.allow_only({"alpha_min", "alpha_max", "beta_min", "beta_max"});
    in.box = SearchBox{box.at("alpha_min").number(), box.at("alpha_max").number(),
                       box.at("beta_min").number(), box.at("beta_max").number()};
  }
  return in;
}

/// "amin,amax,bmin,bmax"
inline SearchBox parse_search_box(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::SearchBoxInvalid, "cannot parse '" + item + "' in search box");
    }
  }
  if (parts.size() != 4) {
    throw Error(ErrorKind::SearchBoxInvalid, "search box needs alpha_min,alpha_max,beta_min,beta_max");
  }
  return {parts[0], parts[1], parts[2], parts[3]};
}

}  // namespace wupd
