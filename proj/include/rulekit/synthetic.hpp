#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rulekit/dataset.hpp"
#include "rulekit/table.hpp"

namespace rulekit {

/// Every legal end-of-game tic-tac-toe board with x moving first: 958
/// boards, 626 of them x wins. Columns top-left ... bottom-right hold
/// x / o / b, the "class" column holds "positive" for an x win and
/// "negative" otherwise. Rows are in lexicographic board order.
Table tic_tac_toe_table();
ColumnSchema tic_tac_toe_schema();

/// Blood-donation-shaped table: 748 donors, four numeric columns (recency,
/// frequency, monetary = 250 * frequency, time) and a 0/1 "donated" label
/// drawn from a logistic model. Deterministic for a given seed.
Table transfusion_like_table(std::uint64_t seed = 7);
ColumnSchema transfusion_like_schema();

/// Random design matrix with density `p`. Labels come from a planted DNF of
/// `planted_rules` conjunctions of 1 to 3 features, each label flipped with
/// probability `noise`.
BinaryDataset random_binary_dataset(std::size_t n, std::size_t d, std::uint64_t seed, double p = 0.5,
                                    std::size_t planted_rules = 2, double noise = 0.05);

/// Random weighted samples for property tests: a 0/1 design, arbitrary labels.
BinaryDataset random_unstructured_dataset(std::size_t n, std::size_t d, std::uint64_t seed, double p = 0.5,
                                          double positive_rate = 0.5);

/// Columns [0, keep) of `data`.
BinaryDataset leading_features(const BinaryDataset& data, std::size_t keep);
/// The given feature columns of `data`, in that order.
BinaryDataset select_features(const BinaryDataset& data, std::span<const FeatureIndex> features);

}  // namespace rulekit
