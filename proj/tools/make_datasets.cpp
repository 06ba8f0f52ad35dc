// Writes the generated benchmark tables and their schemas into a directory.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "rulekit/synthetic.hpp"
#include "rulekit/table.hpp"

namespace {

void write_schema(const std::filesystem::path& path, const rulekit::ColumnSchema& s) {
  nlohmann::ordered_json j;
  j["label"] = s.label_column;
  if (s.positive_label) j["positive"] = *s.positive_label;
  nlohmann::ordered_json cols = nlohmann::ordered_json::object();
  for (const auto& [name, kind] : s.kinds)
    cols[name] = kind == rulekit::ColumnKind::numeric ? "numeric" : kind == rulekit::ColumnKind::binary ? "binary"
                                                                                                      : "categorical";
  j["columns"] = cols;
  std::ofstream(path) << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "tictactoe.csv");
    rulekit::write_csv(out, rulekit::tic_tac_toe_table());
  }
  write_schema(dir / "tictactoe.schema.json", rulekit::tic_tac_toe_schema());
  {
    std::ofstream out(dir / "transfusion_like.csv");
    rulekit::write_csv(out, rulekit::transfusion_like_table());
  }
  write_schema(dir / "transfusion_like.schema.json", rulekit::transfusion_like_schema());
  std::cout << "wrote tables to " << dir << '\n';
  return 0;
}
