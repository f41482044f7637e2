#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "onionlab/error.hpp"
#include "onionlab/io.hpp"

namespace onionlab {

namespace {

// Uniform access to TOML tables and JSON objects.
class Reader {
 public:
  virtual ~Reader() = default;
  virtual bool has(const std::string& key) const = 0;
  virtual std::optional<double> number(const std::string& key) const = 0;
  virtual std::optional<std::int64_t> integer(const std::string& key) const = 0;
  virtual std::optional<bool> boolean(const std::string& key) const = 0;
  virtual std::optional<std::string> string(const std::string& key) const = 0;
  virtual std::optional<std::vector<double>> numbers(const std::string& key) const = 0;
};

class TomlReader : public Reader {
 public:
  explicit TomlReader(toml::table t) : t_(std::move(t)) {}
  bool has(const std::string& key) const override { return t_.contains(key); }
  std::optional<double> number(const std::string& key) const override { return t_[key].value<double>(); }
  std::optional<std::int64_t> integer(const std::string& key) const override {
    if (!t_[key].is_integer()) return std::nullopt;
    return t_[key].value<std::int64_t>();
  }
  std::optional<bool> boolean(const std::string& key) const override { return t_[key].value<bool>(); }
  std::optional<std::string> string(const std::string& key) const override {
    return t_[key].value<std::string>();
  }
  std::optional<std::vector<double>> numbers(const std::string& key) const override {
    const toml::array* a = t_[key].as_array();
    if (!a) return std::nullopt;
    std::vector<double> out;
    for (const auto& e : *a) {
      const auto v = e.value<double>();
      if (!v) return std::nullopt;
      out.push_back(*v);
    }
    return out;
  }

 private:
  toml::table t_;
};

class JsonReader : public Reader {
 public:
  explicit JsonReader(nlohmann::json j) : j_(std::move(j)) {}
  bool has(const std::string& key) const override { return j_.contains(key); }
  std::optional<double> number(const std::string& key) const override {
    if (!j_.at(key).is_number()) return std::nullopt;
    return j_.at(key).get<double>();
  }
  std::optional<std::int64_t> integer(const std::string& key) const override {
    if (!j_.at(key).is_number_integer()) return std::nullopt;
    return j_.at(key).get<std::int64_t>();
  }
  std::optional<bool> boolean(const std::string& key) const override {
    if (!j_.at(key).is_boolean()) return std::nullopt;
    return j_.at(key).get<bool>();
  }
  std::optional<std::string> string(const std::string& key) const override {
    if (!j_.at(key).is_string()) return std::nullopt;
    return j_.at(key).get<std::string>();
  }
  std::optional<std::vector<double>> numbers(const std::string& key) const override {
    if (!j_.at(key).is_array()) return std::nullopt;
    std::vector<double> out;
    for (const auto& e : j_.at(key)) {
      if (!e.is_number()) return std::nullopt;
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  nlohmann::json j_;
};

struct PlanBuilder {
  const Reader& r;
  std::string source;

  [[noreturn]] void fail(const std::string& key, const std::string& what, const std::string& example) const {
    throw ParseError(source + ": " + what + " '" + key + "' (example: " + key + " = " + example + ")");
  }

  template <class Get>
  auto require(const std::string& key, Get get, const std::string& example) const {
    if (!r.has(key)) fail(key, "missing required key", example);
    auto v = get(key);
    if (!v) fail(key, "wrong type for key", example);
    return *v;
  }
  template <class Get, class T>
  void optional(const std::string& key, Get get, T& out, const std::string& example) const {
    if (!r.has(key)) return;
    auto v = get(key);
    if (!v) fail(key, "wrong type for key", example);
    out = static_cast<T>(*v);
  }

  ExperimentPlan build() const {
    auto num = [&](const std::string& k) { return r.number(k); };
    auto integer = [&](const std::string& k) { return r.integer(k); };
    auto boolean = [&](const std::string& k) { return r.boolean(k); };
    auto nums = [&](const std::string& k) { return r.numbers(k); };
    auto str = [&](const std::string& k) { return r.string(k); };

    ExperimentPlan p;
    const std::string model = require("model", str, "\"ball\"");
    if (model == "ball") {
      p.model = Model::Ball;
    } else if (model == "parabolic") {
      p.model = Model::Parabolic;
    } else {
      fail("model", "unknown value for key", "\"ball\" or \"parabolic\"");
    }
    p.d = static_cast<int>(require("d", integer, "2"));
    p.n_max = static_cast<int>(require("n_max", integer, "3"));
    p.replications = static_cast<int>(require("replications", integer, "200"));
    p.seed = static_cast<std::uint64_t>(require("seed", integer, "1"));
    if (p.model == Model::Ball) {
      p.lambda_grid = require("lambda_grid", nums, "[500, 1000, 2000, 4000, 8000]");
    } else {
      optional("lambda_grid", nums, p.lambda_grid, "[500, 1000]");
    }
    if (r.has("k_set")) {
      p.k_set.clear();
      for (double k : require("k_set", nums, "[0, 1]")) p.k_set.push_back(static_cast<int>(k));
    }
    optional("volumes", boolean, p.volumes, "true");
    optional("mc_directions", integer, p.mc_directions, "256");
    optional("full_peel", boolean, p.full_peel, "false");
    optional("threads", integer, p.threads, "0");
    optional("r", num, p.r, "8.0");
    optional("H", num, p.H, "20.0");
    optional("intensity", num, p.intensity, "1.0");
    optional("h_grid", nums, p.h_grid, "[0.0, 0.25, 0.5]");
    try {
      p.validate();
    } catch (const InvalidInput& e) {
      throw ParseError(source + ": " + e.what());
    }
    return p;
  }
};

}  // namespace

ExperimentPlan parse_plan_toml(const std::string& text, const std::string& source) {
  toml::table t;
  try {
    t = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ": " << e.description();
    throw ParseError(msg.str());
  }
  const TomlReader reader(std::move(t));
  return PlanBuilder{reader, source}.build();
}

ExperimentPlan parse_plan_json(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(source + ": top level must be an object");
  const JsonReader reader(std::move(j));
  return PlanBuilder{reader, source}.build();
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return is_json ? parse_plan_json(ss.str(), path) : parse_plan_toml(ss.str(), path);
}

}  // namespace onionlab
