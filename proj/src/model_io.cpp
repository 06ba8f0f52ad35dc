#include "rulekit/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "rulekit/error.hpp"
#include "rulekit/learner.hpp"

namespace rulekit {

using nlohmann::ordered_json;

Model Model::from(const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h) {
  Model m;
  m.features.assign(data.descriptors().begin(), data.descriptors().end());
  m.hyperparams = h;
  for (const auto& r : rules.rules()) m.rules.push_back(r.feature_vector());
  return m;
}

namespace {

ordered_json descriptor_json(const FeatureDescriptor& d) {
  ordered_json j;
  j["name"] = d.name;
  j["source_column"] = d.source_column;
  j["source_name"] = d.source_name;
  j["kind"] = std::string(to_string(d.kind));
  if (const auto* s = std::get_if<std::string>(&d.operand))
    j["operand"] = *s;
  else
    j["operand"] = std::get<double>(d.operand);
  return j;
}

FeatureDescriptor descriptor_from(const ordered_json& j) {
  FeatureDescriptor d;
  d.name = j.at("name").get<std::string>();
  d.source_column = j.at("source_column").get<std::size_t>();
  d.source_name = j.at("source_name").get<std::string>();
  d.kind = feature_kind_from_string(j.at("kind").get<std::string>());
  const auto& op = j.at("operand");
  const bool numeric_kind = d.kind == FeatureKind::numeric_le || d.kind == FeatureKind::numeric_gt;
  if (numeric_kind) {
    if (!op.is_number()) throw IoError("feature '" + d.name + "': numeric operand expected");
    d.operand = op.get<double>();
  } else {
    if (!op.is_string()) throw IoError("feature '" + d.name + "': string operand expected");
    d.operand = op.get<std::string>();
  }
  return d;
}

}  // namespace

void save_model(std::ostream& out, const Model& model) {
  const Hyperparams& h = model.hyperparams;
  ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["hyperparams"] = {{"beta0", h.beta0},   {"beta1", h.beta1},       {"beta2", h.beta2},
                      {"lambda", h.lambda}, {"max_rules", h.max_rules}, {"active_set_size", h.active_set_size}};
  ordered_json feats = ordered_json::array();
  for (const auto& d : model.features) feats.push_back(descriptor_json(d));
  j["features"] = std::move(feats);
  ordered_json rules = ordered_json::array();
  for (const auto& r : model.rules) {
    std::vector<std::string> names;
    for (FeatureIndex f : r) {
      if (f >= model.features.size()) throw IoError("rule refers to unknown feature index " + std::to_string(f));
      names.push_back(model.features[f].name);
    }
    std::sort(names.begin(), names.end());
    rules.push_back(names);
  }
  j["rules"] = std::move(rules);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed to write model");
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  save_model(out, model);
}

Model load_model(std::istream& in) {
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  }
  Model m;
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) throw IoError("unsupported model format_version " + std::to_string(version));
    const auto& h = j.at("hyperparams");
    m.hyperparams.beta0 = h.at("beta0").get<double>();
    m.hyperparams.beta1 = h.at("beta1").get<double>();
    m.hyperparams.beta2 = h.at("beta2").get<double>();
    m.hyperparams.lambda = h.at("lambda").get<double>();
    m.hyperparams.max_rules = h.value("max_rules", m.hyperparams.max_rules);
    m.hyperparams.active_set_size = h.value("active_set_size", m.hyperparams.active_set_size);
    std::map<std::string, FeatureIndex, std::less<>> by_name;
    for (const auto& fj : j.at("features")) {
      m.features.push_back(descriptor_from(fj));
      const auto idx = static_cast<FeatureIndex>(m.features.size() - 1);
      if (!by_name.emplace(m.features.back().name, idx).second)
        throw IoError("duplicate feature name '" + m.features.back().name + "'");
    }
    for (const auto& rj : j.at("rules")) {
      std::vector<FeatureIndex> rule;
      for (const auto& nj : rj) {
        const auto name = nj.get<std::string>();
        auto it = by_name.find(name);
        if (it == by_name.end()) throw IoError("rule names unknown feature '" + name + "'");
        rule.push_back(it->second);
      }
      std::sort(rule.begin(), rule.end());
      if (std::adjacent_find(rule.begin(), rule.end()) != rule.end()) throw IoError("rule repeats a feature");
      m.rules.push_back(std::move(rule));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  } catch (const DataError& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  }
  return m;
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model '" + path.string() + "'");
  return load_model(in);
}

std::string render_rule(const Model& model, const std::vector<FeatureIndex>& rule) {
  if (rule.empty()) return "TRUE";
  std::vector<std::string> names;
  for (FeatureIndex f : rule) names.push_back(model.features.at(f).name);
  std::sort(names.begin(), names.end());
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += " AND ";
    out += n;
  }
  return out;
}

std::vector<std::uint8_t> predict_labels(const Model& model, const BinaryDataset& data) {
  if (data.feature_count() != model.features.size())
    throw DataError("data has " + std::to_string(data.feature_count()) + " features, model expects " +
                    std::to_string(model.features.size()));
  const BitVector hits = predict(model.rules, data);
  std::vector<std::uint8_t> out(data.sample_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = hits.test(i) ? 1 : 0;
  return out;
}

}  // namespace rulekit
