#include <sstream>

#include "fcl/aps.hpp"

namespace fcl {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Splits on commas outside of any bracket.
std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(' || ch == '{' || ch == '[') ++depth;
    if (ch == ')' || ch == '}' || ch == ']') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

struct Field {
  std::string key, value;
};

std::vector<Field> fields(const std::string& line, int lineno) {
  std::vector<Field> out;
  std::size_t i = 0;
  auto fail = [&](const std::string& m) { throw ApsError("line " + std::to_string(lineno) + ": " + m); };
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    auto eq = line.find('=', i);
    if (eq == std::string::npos) fail("expected key=value");
    Field f{line.substr(i, eq - i), ""};
    i = eq + 1;
    if (i < line.size() && line[i] == '{') {
      int depth = 0;
      std::size_t j = i;
      for (; j < line.size(); ++j) {
        if (line[j] == '{') ++depth;
        if (line[j] == '}' && --depth == 0) break;
      }
      if (j >= line.size()) fail("unbalanced braces in " + f.key);
      f.value = line.substr(i + 1, j - i - 1);
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      f.value = line.substr(i, j - i);
      i = j;
    }
    out.push_back(f);
  }
  return out;
}

}  // namespace

std::string aps_to_text(const KripkeStructure& k, const Aps& p, const FormulaPtr& formula) {
  std::ostringstream os;
  os << "aps 1\n";
  if (formula) os << "formula: " << to_string(formula) << "\n";
  os << "counters:";
  for (const auto& c : p.counters) os << " " << c;
  os << "\n";
  for (const auto& comp : p.comps) {
    os << (comp.loop ? "loop" : "row") << "\n";
    for (const auto& a : comp.states) {
      os << "  state=" << k.name(a.state) << " labels={";
      bool first = true;
      for (const auto& [key, f] : a.labels) {
        os << (first ? "" : ", ") << to_string(f);
        first = false;
      }
      os << "} guards={";
      first = true;
      for (const auto& [c, neg] : a.guards) {
        os << (first ? "" : ",") << p.counters[c] << (neg ? "<0" : ">=0");
        first = false;
      }
      os << "} updates={";
      first = true;
      for (const auto& [c, v] : a.updates) {
        os << (first ? "" : ",") << p.counters[c] << ":" << (v >= 0 ? "+" : "") << v;
        first = false;
      }
      os << "} type=" << (a.loop_type ? "L" : "R") << "\n";
    }
  }
  return os.str();
}

ParsedAps parse_aps(const KripkeStructure& k, const std::string& text) {
  ParsedAps out;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool header = false;
  auto fail = [&](const std::string& m) { throw ApsError("line " + std::to_string(lineno) + ": " + m); };
  auto counter = [&](const std::string& name) {
    for (std::size_t i = 0; i < out.aps.counters.size(); ++i)
      if (out.aps.counters[i] == name) return static_cast<int>(i);
    fail("undeclared counter " + name);
    return -1;
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "aps 1") fail("expected header 'aps 1'");
      header = true;
      continue;
    }
    if (line.rfind("formula:", 0) == 0) {
      try {
        out.formula = parse_formula(trim(line.substr(8)));
      } catch (const std::exception& e) {
        fail(e.what());
      }
    } else if (line.rfind("counters:", 0) == 0) {
      std::istringstream cs(line.substr(9));
      std::string c;
      while (cs >> c) out.aps.add_counter(c);
    } else if (line == "row" || line == "loop") {
      out.aps.comps.push_back({line == "loop", {}});
    } else {
      if (out.aps.comps.empty()) fail("state before any component");
      AugState a;
      bool have_state = false;
      for (const auto& f : fields(line, lineno)) {
        if (f.key == "state") {
          a.state = k.index_of(f.value);
          if (a.state < 0) fail("unknown state " + f.value);
          have_state = true;
        } else if (f.key == "labels") {
          for (const auto& s : split_top(f.value)) {
            if (s.empty()) fail("empty label");
            try {
              a.add(parse_formula(s));
            } catch (const std::exception& e) {
              fail(std::string("label '") + s + "': " + e.what());
            }
          }
        } else if (f.key == "guards") {
          for (const auto& s : split_top(f.value)) {
            if (s.size() > 2 && s.substr(s.size() - 2) == "<0") a.guards[counter(trim(s.substr(0, s.size() - 2)))] = true;
            else if (s.size() > 3 && s.substr(s.size() - 3) == ">=0")
              a.guards[counter(trim(s.substr(0, s.size() - 3)))] = false;
            else
              fail("bad guard '" + s + "'");
          }
        } else if (f.key == "updates") {
          for (const auto& s : split_top(f.value)) {
            auto colon = s.find(':');
            if (colon == std::string::npos) fail("bad update '" + s + "'");
            int c = counter(trim(s.substr(0, colon)));
            try {
              a.updates[c] = std::stoll(trim(s.substr(colon + 1)));
            } catch (const std::logic_error&) {
              fail("bad update value '" + s + "'");
            }
          }
        } else if (f.key == "type") {
          if (f.value != "L" && f.value != "R") fail("type must be L or R");
          a.loop_type = f.value == "L";
        } else {
          fail("unknown field " + f.key);
        }
      }
      if (!have_state) fail("missing state");
      out.aps.comps.back().states.push_back(std::move(a));
    }
  }
  if (!header) throw ApsError("empty certificate");
  return out;
}

}  // namespace fcl
