#include "divekit/instance_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace divekit {

using nlohmann::json;

std::string instance_to_json(const MilpInstance& inst) {
  json j;
  j["format"] = "divekit-milp";
  j["version"] = kInstanceFormatVersion;
  j["name"] = inst.name;
  j["n"] = inst.num_vars;
  j["m"] = inst.num_rows;
  j["c"] = inst.objective;
  json rows = json::array();
  for (int i = 0; i < inst.num_rows; ++i) {
    json row = json::array();
    auto cols = inst.row_cols(i);
    auto vals = inst.row_values(i);
    for (size_t k = 0; k < cols.size(); ++k) row.push_back(json::array({cols[k], vals[k]}));
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  std::string sense;
  for (auto s : inst.sense) sense.push_back(sense_code(s));
  j["sense"] = sense;
  j["b"] = inst.rhs;
  j["lb"] = inst.lower;
  j["ub"] = inst.upper;
  j["int"] = inst.integers;
  std::vector<int> divable(inst.divable.begin(), inst.divable.end());
  j["divable"] = divable;
  bool named = false;
  for (const auto& s : inst.var_names) named = named || !s.empty();
  for (const auto& s : inst.row_names) named = named || !s.empty();
  if (named) {
    j["var_names"] = inst.var_names;
    j["row_names"] = inst.row_names;
  }
  return j.dump();
}

MilpInstance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(1, e.what());
  }
  try {
    if (j.value("format", std::string{}) != "divekit-milp") throw ParseError(1, "not a divekit-milp document");
    if (j.at("version").get<int>() != kInstanceFormatVersion)
      throw UnsupportedFeature("instance format version " + std::to_string(j.at("version").get<int>()));
    MilpInstance inst;
    inst.name = j.value("name", std::string{});
    inst.num_vars = j.at("n").get<int>();
    inst.num_rows = j.at("m").get<int>();
    inst.objective = j.at("c").get<std::vector<double>>();
    inst.row_start.assign(1, 0);
    for (const auto& row : j.at("rows")) {
      for (const auto& e : row) {
        inst.col_index.push_back(e.at(0).get<int>());
        inst.values.push_back(e.at(1).get<double>());
      }
      inst.row_start.push_back(static_cast<int>(inst.values.size()));
    }
    for (char c : j.at("sense").get<std::string>()) inst.sense.push_back(sense_from_code(c));
    inst.rhs = j.at("b").get<std::vector<double>>();
    inst.lower = j.at("lb").get<std::vector<double>>();
    inst.upper = j.at("ub").get<std::vector<double>>();
    inst.integers = j.at("int").get<std::vector<int>>();
    inst.is_integer.assign(inst.num_vars, 0);
    for (int k : inst.integers)
      if (k >= 0 && k < inst.num_vars) inst.is_integer[k] = 1;
    auto divable = j.at("divable").get<std::vector<int>>();
    inst.divable.assign(divable.begin(), divable.end());
    if (j.contains("var_names")) inst.var_names = j["var_names"].get<std::vector<std::string>>();
    if (j.contains("row_names")) inst.row_names = j["row_names"].get<std::vector<std::string>>();
    if (inst.var_names.empty()) inst.var_names.assign(inst.num_vars, "");
    if (inst.row_names.empty()) inst.row_names.assign(inst.num_rows, "");
    inst.validate();
    return inst;
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("schema error: ") + e.what());
  }
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& s, int line) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError(line, "malformed number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError(line, "malformed number '" + s + "'");
  }
}

}  // namespace

MilpInstance instance_from_mps(const std::string& text) {
  enum class Section { kNone, kRows, kColumns, kRhs, kBounds, kEnd };
  Section section = Section::kNone;
  std::string name;
  std::string objective_row;
  std::set<std::string> free_rows;
  std::vector<std::string> row_names;
  std::vector<RowSense> senses;
  std::map<std::string, int> row_index;
  std::vector<std::string> col_names;
  std::map<std::string, int> col_index;
  std::vector<std::vector<RowEntry>> rows;
  std::vector<double> cost, rhs, lower, upper;
  std::vector<char> integer;
  bool in_int_block = false;

  auto column = [&](const std::string& cname, int line) {
    auto it = col_index.find(cname);
    if (it != col_index.end()) return it->second;
    if (section != Section::kColumns) throw ParseError(line, "unknown column '" + cname + "'");
    const int j = static_cast<int>(col_names.size());
    col_index.emplace(cname, j);
    col_names.push_back(cname);
    cost.push_back(0.0);
    lower.push_back(0.0);
    upper.push_back(kInfinity);
    integer.push_back(in_int_block ? 1 : 0);
    return j;
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty() || raw[0] == '*') continue;
    const auto tok = split_ws(raw);
    if (tok.empty()) continue;
    if (raw[0] != ' ' && raw[0] != '\t') {
      const std::string& head = tok[0];
      if (head == "NAME") {
        name = tok.size() > 1 ? tok[1] : "";
        section = Section::kNone;
      } else if (head == "ROWS") {
        section = Section::kRows;
      } else if (head == "COLUMNS") {
        section = Section::kColumns;
      } else if (head == "RHS") {
        section = Section::kRhs;
      } else if (head == "BOUNDS") {
        section = Section::kBounds;
      } else if (head == "ENDATA") {
        section = Section::kEnd;
        break;
      } else if (head == "RANGES" || head == "OBJSENSE" || head == "SOS" ||
                 head == "QUADOBJ" || head == "QMATRIX" || head == "QCMATRIX" || head == "INDICATORS") {
        throw UnsupportedFeature("MPS section " + head + " (line " + std::to_string(line_no) + ")");
      } else {
        throw ParseError(line_no, "unknown section '" + head + "'");
      }
      continue;
    }

    switch (section) {
      case Section::kRows: {
        if (tok.size() != 2) throw ParseError(line_no, "ROWS entry needs type and name");
        const std::string& type = tok[0];
        if (type == "N") {
          if (objective_row.empty()) objective_row = tok[1];
          else free_rows.insert(tok[1]);
          continue;
        }
        RowSense s;
        if (type == "L") s = RowSense::kLe;
        else if (type == "G") s = RowSense::kGe;
        else if (type == "E") s = RowSense::kEq;
        else throw ParseError(line_no, "unknown row type '" + type + "'");
        if (row_index.count(tok[1])) throw ParseError(line_no, "duplicate row '" + tok[1] + "'");
        row_index.emplace(tok[1], static_cast<int>(row_names.size()));
        row_names.push_back(tok[1]);
        senses.push_back(s);
        rows.emplace_back();
        rhs.push_back(0.0);
        break;
      }
      case Section::kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") in_int_block = true;
          else if (tok[2] == "'INTEND'") in_int_block = false;
          else throw ParseError(line_no, "unknown marker " + tok[2]);
          continue;
        }
        if (tok.size() != 3 && tok.size() != 5) throw ParseError(line_no, "COLUMNS entry needs 3 or 5 fields");
        const int j = column(tok[0], line_no);
        for (size_t k = 1; k + 1 < tok.size(); k += 2) {
          const double v = parse_number(tok[k + 1], line_no);
          if (tok[k] == objective_row) {
            cost[j] += v;
          } else if (!free_rows.count(tok[k])) {
            auto it = row_index.find(tok[k]);
            if (it == row_index.end()) throw ParseError(line_no, "unknown row '" + tok[k] + "'");
            rows[it->second].push_back({j, v});
          }
        }
        break;
      }
      case Section::kRhs: {
        if (tok.size() != 3 && tok.size() != 5) throw ParseError(line_no, "RHS entry needs 3 or 5 fields");
        for (size_t k = 1; k + 1 < tok.size(); k += 2) {
          const double v = parse_number(tok[k + 1], line_no);
          if (tok[k] == objective_row || free_rows.count(tok[k])) continue;
          auto it = row_index.find(tok[k]);
          if (it == row_index.end()) throw ParseError(line_no, "unknown row '" + tok[k] + "'");
          rhs[it->second] = v;
        }
        break;
      }
      case Section::kBounds: {
        if (tok.size() < 3) throw ParseError(line_no, "BOUNDS entry too short");
        const std::string& type = tok[0];
        const int j = column(tok[2], line_no);
        const bool needs_value = type == "UP" || type == "LO" || type == "FX";
        if (needs_value && tok.size() != 4) throw ParseError(line_no, type + " bound needs a value");
        const double v = needs_value ? parse_number(tok[3], line_no) : 0.0;
        if (type == "UP") {
          upper[j] = v;
        } else if (type == "LO") {
          lower[j] = v;
        } else if (type == "FX") {
          lower[j] = v;
          upper[j] = v;
        } else if (type == "BV") {
          lower[j] = 0.0;
          upper[j] = 1.0;
          integer[j] = 1;
        } else if (type == "MI") {
          lower[j] = -kInfinity;
        } else if (type == "PL") {
          upper[j] = kInfinity;
        } else if (type == "FR") {
          lower[j] = -kInfinity;
          upper[j] = kInfinity;
        } else {
          throw UnsupportedFeature("MPS bound type " + type + " (line " + std::to_string(line_no) + ")");
        }
        break;
      }
      case Section::kNone:
      case Section::kEnd:
        throw ParseError(line_no, "data line outside of a section");
    }
  }
  if (section != Section::kEnd) throw ParseError(line_no, "missing ENDATA");

  MilpBuilder b(name);
  for (size_t j = 0; j < col_names.size(); ++j)
    b.add_var(lower[j], upper[j], cost[j], integer[j] != 0, col_names[j]);
  for (size_t i = 0; i < rows.size(); ++i) b.add_row(std::move(rows[i]), senses[i], rhs[i], row_names[i]);
  return std::move(b).build();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

MilpInstance read_instance(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  if (path.extension() == ".mps" || path.extension() == ".MPS") return instance_from_mps(text);
  return instance_from_json(text);
}

void write_instance(const MilpInstance& inst, const std::filesystem::path& path) {
  write_text_file(path, instance_to_json(inst) + "\n");
}

}  // namespace divekit
