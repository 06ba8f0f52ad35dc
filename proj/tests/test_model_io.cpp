#include <doctest.h>

#include <sstream>
#include <string>

#include "rulekit/error.hpp"
#include "rulekit/learner.hpp"
#include "rulekit/model_io.hpp"
#include "rulekit/synthetic.hpp"
#include "tictactoe_rules.hpp"

using namespace rulekit;

namespace {

Model round_trip(const Model& m, std::string* text = nullptr) {
  std::ostringstream out;
  save_model(out, m);
  if (text) *text = out.str();
  std::istringstream in(out.str());
  return load_model(in);
}

Model load_text(const std::string& text) {
  std::istringstream in(text);
  return load_model(in);
}

}  // namespace

TEST_CASE("model round trip keeps rules, names and hyperparameters") {
  auto data = binarize(tic_tac_toe_table(), tic_tac_toe_schema()).data;
  Hyperparams h;
  h.beta2 = 0.01;
  h.lambda = 8;
  h.max_rules = 8;
  RuleSet s = make_rule_set(data, testing::win_lines(data));
  Model m = Model::from(s, data, h);
  std::string text;
  Model back = round_trip(m, &text);
  CHECK(back.hyperparams == h);
  CHECK(back.rules == m.rules);
  REQUIRE(back.features.size() == m.features.size());
  for (std::size_t j = 0; j < m.features.size(); ++j) CHECK(back.features[j] == m.features[j]);
  CHECK(predict_labels(back, data) == predict_labels(m, data));

  // byte-stable
  std::string again;
  round_trip(back, &again);
  CHECK(again == text);
  CHECK(text.find("\"format_version\": 1") != std::string::npos);
}

TEST_CASE("numeric descriptors round trip") {
  auto data = binarize(transfusion_like_table(), transfusion_like_schema()).data;
  RuleSet s = make_rule_set(data, {{0, 3}, {5}});
  Model m = Model::from(s, data, {});
  Model back = round_trip(m);
  for (std::size_t j = 0; j < m.features.size(); ++j) CHECK(back.features[j] == m.features[j]);
  CHECK(back.rules == m.rules);
}

TEST_CASE("single-literal model keeps its descriptor name") {
  auto data = binarize(tic_tac_toe_table(), tic_tac_toe_schema()).data;
  const auto j = *data.find_feature("middle-middle = o");
  Model m = Model::from(make_rule_set(data, {{j}}), data, {});
  Model back = round_trip(m);
  REQUIRE(back.rules.size() == 1);
  CHECK(render_rule(back, back.rules[0]) == "middle-middle = o");
}

TEST_CASE("empty model predicts zero everywhere") {
  auto data = binarize(tic_tac_toe_table(), tic_tac_toe_schema()).data;
  Model m = Model::from(RuleSet(data.sample_count()), data, {});
  Model back = round_trip(m);
  CHECK(back.rules.empty());
  auto labels = predict_labels(back, data);
  CHECK(std::count(labels.begin(), labels.end(), 1) == 0);
}

TEST_CASE("rendering") {
  auto data = binarize(tic_tac_toe_table(), tic_tac_toe_schema()).data;
  Model m = Model::from(make_rule_set(data, testing::win_lines(data)), data, {});
  CHECK(render_rule(m, m.rules[0]) == "top-left = x AND top-middle = x AND top-right = x");
  CHECK(render_rule(m, {}) == "TRUE");
}

TEST_CASE("malformed models are rejected") {
  auto data = binarize(tic_tac_toe_table(), tic_tac_toe_schema()).data;
  Model m = Model::from(make_rule_set(data, {{0, 2}}), data, {});
  std::string text;
  round_trip(m, &text);

  CHECK_THROWS_AS(load_text("{ nope"), IoError);
  CHECK_THROWS_AS(load_text("{}"), IoError);

  std::string bad_version = text;
  bad_version.replace(bad_version.find("\"format_version\": 1"), 19, "\"format_version\": 7");
  CHECK_THROWS_AS(load_text(bad_version), IoError);

  const std::string name = m.features[m.rules[0][0]].name;
  std::string unknown = text;
  const auto pos = unknown.rfind("\"" + name + "\"");
  unknown.replace(pos, name.size() + 2, "\"no such feature\"");
  CHECK_THROWS_AS(load_text(unknown), IoError);

  CHECK_THROWS_AS(load_model(std::filesystem::path("/nonexistent/model.json")), IoError);
}
