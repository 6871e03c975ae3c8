#include "mapirl/harness.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

namespace mapirl {

void write_demos(const DemonstrationSet& demos, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  nlohmann::json header;
  header["env"] = demos.env_tag;
  header["version"] = 1;
  out << header.dump() << "\n";
  for (const Trajectory& tr : demos.trajectories) {
    nlohmann::json line;
    line["states"] = tr.states;
    line["actions"] = tr.actions;
    line["terminal_included"] = tr.terminal_included;
    out << line.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

DemonstrationSet read_demos(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  DemonstrationSet demos;
  std::string text;
  int line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed demonstration line: ") + e.what(), line_no);
    }
    try {
      if (line_no == 1) {
        if (j.at("version").get<int>() != 1) {
          throw ParseError("unsupported demonstration file version", line_no);
        }
        demos.env_tag = j.at("env").get<std::string>();
        continue;
      }
      Trajectory tr;
      tr.states = j.at("states").get<std::vector<StateId>>();
      tr.actions = j.at("actions").get<std::vector<ActionId>>();
      tr.terminal_included = j.at("terminal_included").get<bool>();
      if (tr.states.size() != tr.actions.size()) {
        throw ParseError("states and actions lengths differ", line_no);
      }
      demos.trajectories.push_back(std::move(tr));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed demonstration line: ") + e.what(), line_no);
    }
  }
  if (line_no == 0) throw ParseError("empty demonstration file", 1);
  return demos;
}

}  // namespace mapirl
