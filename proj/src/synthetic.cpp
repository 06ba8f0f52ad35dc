#include "rulekit/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "rulekit/error.hpp"

namespace rulekit {

namespace {

using Board = std::array<char, 9>;

bool wins(const Board& b, char p) {
  static constexpr int lines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                                      {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
  for (const auto& l : lines)
    if (b[l[0]] == p && b[l[1]] == p && b[l[2]] == p) return true;
  return false;
}

void play(Board& b, char turn, std::set<Board>& finals) {
  const bool full = std::find(b.begin(), b.end(), 'b') == b.end();
  if (wins(b, 'x') || wins(b, 'o') || full) {
    finals.insert(b);
    return;
  }
  for (int c = 0; c < 9; ++c) {
    if (b[c] != 'b') continue;
    b[c] = turn;
    play(b, turn == 'x' ? 'o' : 'x', finals);
    b[c] = 'b';
  }
}

}  // namespace

Table tic_tac_toe_table() {
  std::set<Board> finals;
  Board b;
  b.fill('b');
  play(b, 'x', finals);
  Table t;
  t.header = {"top-left",    "top-middle",    "top-right",    "middle-left", "middle-middle",
              "middle-right", "bottom-left", "bottom-middle", "bottom-right", "class"};
  for (const Board& f : finals) {
    std::vector<std::string> row;
    for (char c : f) row.emplace_back(1, c);
    row.emplace_back(wins(f, 'x') ? "positive" : "negative");
    t.rows.push_back(std::move(row));
  }
  return t;
}

ColumnSchema tic_tac_toe_schema() {
  ColumnSchema s;
  s.label_column = "class";
  s.positive_label = "positive";
  static const char* names[] = {"top-left",     "top-middle",  "top-right",     "middle-left", "middle-middle",
                                "middle-right", "bottom-left", "bottom-middle", "bottom-right"};
  for (const char* n : names) s.kinds[n] = ColumnKind::categorical;
  return s;
}

Table transfusion_like_table(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::geometric_distribution<int> freq_extra(0.18);
  std::uniform_int_distribution<int> recency_pick(0, 23);
  std::uniform_int_distribution<int> gap_pick(0, 60);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  static constexpr int recency_values[] = {0, 1, 2, 2, 2, 3, 4, 4, 4, 4, 7, 9, 11, 11, 14, 14, 16, 16, 21, 21, 23, 25, 35, 74};
  Table t;
  t.header = {"recency", "frequency", "monetary", "time", "donated"};
  for (int i = 0; i < 748; ++i) {
    const int recency = recency_values[recency_pick(rng)];
    const int frequency = 1 + std::min(freq_extra(rng), 49);
    const int time = recency + 2 + gap_pick(rng) + frequency;
    const double z = -0.45 - 0.09 * recency + 0.11 * frequency - 0.025 * time;
    const int donated = unit(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
    t.rows.push_back({std::to_string(recency), std::to_string(frequency), std::to_string(250 * frequency),
                      std::to_string(time), std::to_string(donated)});
  }
  return t;
}

ColumnSchema transfusion_like_schema() {
  ColumnSchema s;
  s.label_column = "donated";
  for (const char* n : {"recency", "frequency", "monetary", "time"}) s.kinds[n] = ColumnKind::numeric;
  return s;
}

BinaryDataset random_binary_dataset(std::size_t n, std::size_t d, std::uint64_t seed, double p,
                                    std::size_t planted_rules, double noise) {
  if (d == 0) throw ConfigError("random dataset needs at least one feature");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(p), flip(noise);
  std::uniform_int_distribution<std::size_t> feature(0, d - 1), length(1, std::min<std::size_t>(3, d));
  std::vector<BitVector> cols(d, BitVector(n));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (bit(rng)) cols[j].set(i);
  BitVector labels(n);
  for (std::size_t r = 0; r < planted_rules; ++r) {
    BitVector cover = BitVector::ones(n);
    const std::size_t len = length(rng);
    for (std::size_t t = 0; t < len; ++t) cover &= cols[feature(rng)];
    labels |= cover;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (flip(rng)) labels.assign(i, !labels.test(i));
  std::vector<FeatureDescriptor> desc;
  for (std::size_t j = 0; j < d; ++j) desc.push_back(FeatureDescriptor::raw_binary("f" + std::to_string(j), j));
  return BinaryDataset(std::move(cols), std::move(labels), std::move(desc));
}

BinaryDataset random_unstructured_dataset(std::size_t n, std::size_t d, std::uint64_t seed, double p,
                                          double positive_rate) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(p), pos(positive_rate);
  std::vector<BitVector> cols(d, BitVector(n));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (bit(rng)) cols[j].set(i);
  BitVector labels(n);
  for (std::size_t i = 0; i < n; ++i)
    if (pos(rng)) labels.set(i);
  std::vector<FeatureDescriptor> desc;
  for (std::size_t j = 0; j < d; ++j) desc.push_back(FeatureDescriptor::raw_binary("f" + std::to_string(j), j));
  return BinaryDataset(std::move(cols), std::move(labels), std::move(desc));
}

BinaryDataset select_features(const BinaryDataset& data, std::span<const FeatureIndex> features) {
  std::vector<BitVector> cols;
  std::vector<FeatureDescriptor> desc;
  for (FeatureIndex j : features) {
    if (j >= data.feature_count()) throw DataError("feature index out of range");
    cols.push_back(data.column(j));
    desc.push_back(data.descriptor(j));
  }
  return BinaryDataset(std::move(cols), data.labels(), std::move(desc));
}

BinaryDataset leading_features(const BinaryDataset& data, std::size_t keep) {
  std::vector<FeatureIndex> idx(std::min(keep, data.feature_count()));
  for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = static_cast<FeatureIndex>(j);
  return select_features(data, idx);
}

}  // namespace rulekit
