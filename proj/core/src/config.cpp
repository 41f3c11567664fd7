#include "graphmax/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace graphmax {

using nlohmann::json;

Variant parse_variant(const std::string& name) {
  if (name == "full") return Variant::kFull;
  if (name == "+NF") return Variant::kNodeFeatures;
  if (name == "+EF") return Variant::kEmbeddingFeatures;
  if (name == "-P") return Variant::kNoPeriphery;
  if (name == "-H") return Variant::kNoHierarchy;
  throw std::invalid_argument("variant: unknown value '" + name +
                              "' (want full, +NF, +EF, -P, or -H)");
}

std::string to_string(Variant variant) {
  switch (variant) {
    case Variant::kFull: return "full";
    case Variant::kNodeFeatures: return "+NF";
    case Variant::kEmbeddingFeatures: return "+EF";
    case Variant::kNoPeriphery: return "-P";
    case Variant::kNoHierarchy: return "-H";
  }
  return "?";
}

void HyperConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("config: " + field + " " + why);
  };
  if (encoder.num_layers < 1) fail("encoder.num_layers", "must be >= 1");
  if (static_cast<int>(encoder.hidden_units.size()) != encoder.num_layers - 1) {
    fail("encoder.hidden_units", "must list exactly num_layers - 1 widths, got " +
                                     std::to_string(encoder.hidden_units.size()));
  }
  for (int h : encoder.hidden_units) {
    if (h < 1) fail("encoder.hidden_units", "widths must be positive");
  }
  if (encoder.patience < 0) fail("encoder.patience", "must be >= 0");
  if (encoder.max_epochs < 1) fail("encoder.max_epochs", "must be >= 1");
  if (encoder.patience > encoder.max_epochs) fail("encoder.patience", "must be <= max_epochs");
  if (encoder.learning_rate <= 0.0) fail("encoder.learning_rate", "must be positive");
  if (hierarchy.num_levels < 2) fail("hierarchy.num_levels", "must be >= 2");
  if (hierarchy.pool_ratio <= 0.0 || hierarchy.pool_ratio >= 1.0) {
    fail("hierarchy.pool_ratio", "must lie in (0, 1)");
  }
  if (hierarchy.embed_dim < 1) fail("hierarchy.embed_dim", "must be >= 1");
  if (hierarchy.n_p < 1) fail("hierarchy.n_p", "must be >= 1");
  if (hierarchy.n_h < 1) fail("hierarchy.n_h", "must be >= 1");
  if (hierarchy.patience < 0) fail("hierarchy.patience", "must be >= 0");
  if (hierarchy.max_epochs < 1) fail("hierarchy.max_epochs", "must be >= 1");
  if (hierarchy.patience > hierarchy.max_epochs) {
    fail("hierarchy.patience", "must be <= max_epochs");
  }
  if (hierarchy.learning_rate <= 0.0) fail("hierarchy.learning_rate", "must be positive");
  if (workers < 1) fail("workers", "must be >= 1");
}

HyperConfig default_config(const std::string& dataset_name) {
  HyperConfig c;
  c.dataset = dataset_name;
  // Encoder rows: layer count, widths of the non-final layers, patience.
  // Hierarchy rows: pool ratio, negative counts, patience.
  if (dataset_name == "MUTAG") {
    c.encoder = {2, {128}, 30, 2000, 1e-3};
    c.hierarchy = {3, 0.5, 128, 4, 4, 1000, 3000, 1e-3};
  } else if (dataset_name == "PTC" || dataset_name == "PTC_MR") {
    c.encoder = {3, {128, 128}, 30, 2000, 1e-3};
    c.hierarchy = {3, 0.75, 128, 4, 5, 1000, 3000, 1e-3};
  } else if (dataset_name == "PROTEINS") {
    c.encoder = {3, {128, 128}, 40, 2000, 1e-3};
    c.hierarchy = {3, 0.01, 128, 4, 4, 950, 3000, 1e-3};
    c.feature_policy = FeaturePolicy::kUseAttributes;
  } else if (dataset_name == "NCI1") {
    c.encoder = {2, {128}, 30, 2000, 1e-3};
    c.hierarchy = {3, 0.5, 128, 8, 5, 650, 3000, 1e-3};
  } else if (dataset_name == "NCI109") {
    c.encoder = {2, {128}, 30, 2000, 1e-3};
    c.hierarchy = {3, 0.5, 128, 8, 5, 650, 3000, 1e-3};
  } else if (dataset_name == "IMDB-BINARY" || dataset_name == "IMDB-B") {
    c.encoder = {3, {128, 128}, 30, 2000, 1e-3};
    c.hierarchy = {3, 0.25, 128, 4, 4, 850, 3000, 1e-3};
    c.feature_policy = FeaturePolicy::kOneHotDegree;
  } else if (dataset_name == "IMDB-MULTI" || dataset_name == "IMDB-M") {
    c.encoder = {3, {128, 64}, 30, 2000, 1e-3};
    c.hierarchy = {3, 0.25, 128, 5, 5, 1000, 3000, 1e-3};
    c.feature_policy = FeaturePolicy::kOneHotDegree;
  } else {
    c.encoder = {2, {128}, 30, 2000, 1e-3};
    c.hierarchy = {3, 0.5, 128, 4, 4, 1000, 3000, 1e-3};
  }
  return c;
}

namespace {

void require_known_keys(const json& obj, const std::set<std::string>& known,
                        const std::string& scope) {
  for (const auto& [key, value] : obj.items()) {
    if (known.find(key) == known.end()) {
      throw std::invalid_argument("config: unknown key '" +
                                  (scope.empty() ? key : scope + "." + key) + "'");
    }
  }
}

int get_int(const json& obj, const char* key, int fallback, const std::string& scope) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw std::invalid_argument("config: " + scope + "." + key + " must be an integer");
  }
  return v.get<int>();
}

double get_double(const json& obj, const char* key, double fallback, const std::string& scope) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw std::invalid_argument("config: " + scope + "." + key + " must be a number");
  }
  return v.get<double>();
}

}  // namespace

HyperConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");

  require_known_keys(doc, {"dataset", "feature_policy", "seed", "variant", "workers",
                           "encoder", "hierarchy"},
                     "");

  std::string dataset;
  if (doc.contains("dataset")) {
    if (!doc.at("dataset").is_string()) {
      throw std::invalid_argument("config: dataset must be a string");
    }
    dataset = doc.at("dataset").get<std::string>();
  }
  HyperConfig c = default_config(dataset);

  if (doc.contains("feature_policy")) {
    if (!doc.at("feature_policy").is_string()) {
      throw std::invalid_argument("config: feature_policy must be a string");
    }
    c.feature_policy = parse_feature_policy(doc.at("feature_policy").get<std::string>());
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer()) {
      throw std::invalid_argument("config: seed must be a non-negative integer");
    }
    if (doc.at("seed").is_number_integer() && doc.at("seed").get<long long>() < 0) {
      throw std::invalid_argument("config: seed must be a non-negative integer");
    }
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("variant")) {
    if (!doc.at("variant").is_string()) {
      throw std::invalid_argument("config: variant must be a string");
    }
    c.variant = parse_variant(doc.at("variant").get<std::string>());
  }
  c.workers = get_int(doc, "workers", c.workers, "");

  if (doc.contains("encoder")) {
    const json& enc = doc.at("encoder");
    if (!enc.is_object()) throw std::invalid_argument("config: encoder must be an object");
    require_known_keys(enc, {"num_layers", "hidden_units", "patience", "max_epochs",
                             "learning_rate"},
                       "encoder");
    c.encoder.num_layers = get_int(enc, "num_layers", c.encoder.num_layers, "encoder");
    if (enc.contains("hidden_units")) {
      const json& hu = enc.at("hidden_units");
      if (!hu.is_array()) {
        throw std::invalid_argument("config: encoder.hidden_units must be an array");
      }
      c.encoder.hidden_units.clear();
      for (const json& v : hu) {
        if (!v.is_number_integer()) {
          throw std::invalid_argument("config: encoder.hidden_units entries must be integers");
        }
        c.encoder.hidden_units.push_back(v.get<int>());
      }
    } else if (enc.contains("num_layers")) {
      // Layer count changed without widths: default every hidden width to 128.
      c.encoder.hidden_units.assign(std::max(0, c.encoder.num_layers - 1), 128);
    }
    c.encoder.patience = get_int(enc, "patience", c.encoder.patience, "encoder");
    c.encoder.max_epochs = get_int(enc, "max_epochs", c.encoder.max_epochs, "encoder");
    c.encoder.learning_rate =
        get_double(enc, "learning_rate", c.encoder.learning_rate, "encoder");
  }

  if (doc.contains("hierarchy")) {
    const json& hier = doc.at("hierarchy");
    if (!hier.is_object()) throw std::invalid_argument("config: hierarchy must be an object");
    require_known_keys(hier, {"num_levels", "pool_ratio", "embed_dim", "n_p", "n_h",
                              "patience", "max_epochs", "learning_rate"},
                       "hierarchy");
    c.hierarchy.num_levels = get_int(hier, "num_levels", c.hierarchy.num_levels, "hierarchy");
    c.hierarchy.pool_ratio = get_double(hier, "pool_ratio", c.hierarchy.pool_ratio, "hierarchy");
    c.hierarchy.embed_dim = get_int(hier, "embed_dim", c.hierarchy.embed_dim, "hierarchy");
    c.hierarchy.n_p = get_int(hier, "n_p", c.hierarchy.n_p, "hierarchy");
    c.hierarchy.n_h = get_int(hier, "n_h", c.hierarchy.n_h, "hierarchy");
    c.hierarchy.patience = get_int(hier, "patience", c.hierarchy.patience, "hierarchy");
    c.hierarchy.max_epochs = get_int(hier, "max_epochs", c.hierarchy.max_epochs, "hierarchy");
    c.hierarchy.learning_rate =
        get_double(hier, "learning_rate", c.hierarchy.learning_rate, "hierarchy");
  }

  c.validate();
  return c;
}

HyperConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string config_to_json(const HyperConfig& c) {
  json doc;
  doc["dataset"] = c.dataset;
  doc["feature_policy"] = to_string(c.feature_policy);
  doc["seed"] = c.seed;
  doc["variant"] = to_string(c.variant);
  doc["workers"] = c.workers;
  doc["encoder"] = {{"num_layers", c.encoder.num_layers},
                    {"hidden_units", c.encoder.hidden_units},
                    {"patience", c.encoder.patience},
                    {"max_epochs", c.encoder.max_epochs},
                    {"learning_rate", c.encoder.learning_rate}};
  doc["hierarchy"] = {{"num_levels", c.hierarchy.num_levels},
                      {"pool_ratio", c.hierarchy.pool_ratio},
                      {"embed_dim", c.hierarchy.embed_dim},
                      {"n_p", c.hierarchy.n_p},
                      {"n_h", c.hierarchy.n_h},
                      {"patience", c.hierarchy.patience},
                      {"max_epochs", c.hierarchy.max_epochs},
                      {"learning_rate", c.hierarchy.learning_rate}};
  return doc.dump(2) + "\n";
}

}  // namespace graphmax
