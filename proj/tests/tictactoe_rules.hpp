#pragma once

// The eight x win lines as feature-index rules on the binarized board.

#include <string>
#include <vector>

#include "rulekit/dataset.hpp"

namespace testing {

inline std::vector<std::vector<rulekit::FeatureIndex>> win_lines(const rulekit::BinaryDataset& data) {
  static const char* cells[] = {"top-left",    "top-middle",    "top-right",    "middle-left",  "middle-middle",
                                "middle-right", "bottom-left", "bottom-middle", "bottom-right"};
  static const int lines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                                  {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
  std::vector<std::vector<rulekit::FeatureIndex>> out;
  for (const auto& line : lines) {
    std::vector<rulekit::FeatureIndex> r;
    for (int c : line) r.push_back(*data.find_feature(std::string(cells[c]) + " = x"));
    out.push_back(r);
  }
  return out;
}

}  // namespace testing
