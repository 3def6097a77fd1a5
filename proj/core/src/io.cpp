#include "idsolve/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace idsolve {

namespace {

struct Line {
  int number;
  std::string text;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ModelError("line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_number(const std::string& t, double& out) {
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end && *end == '\0' && end != t.c_str();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

InfluenceDiagram parse_model(const std::string& text) {
  std::vector<Line> lines;
  {
    std::istringstream is(text);
    std::string raw;
    int n = 0;
    while (std::getline(is, raw)) {
      ++n;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\t' || raw.back() == '\r'))
        raw.pop_back();
      std::size_t start = raw.find_first_not_of(" \t");
      if (start == std::string::npos) continue;
      lines.push_back({n, raw.substr(start)});
    }
  }

  InfluenceDiagram id;
  struct PendingCpt {
    int line;
    std::vector<std::string> head, tail;
    std::vector<double> values;
  };
  struct PendingUtil {
    int line;
    std::string name;
    std::vector<std::string> vars;
    std::vector<double> values;
  };
  struct PendingArc {
    int line;
    std::string from, to;
  };
  std::vector<PendingCpt> cpts;
  std::vector<PendingUtil> utils;
  std::vector<PendingArc> arcs;
  std::vector<std::pair<int, std::string>> order_names;

  enum class Section { None, Variables, Arcs, Cpt, Utility, Order };
  Section section = Section::None;

  for (const auto& [num, text_] : lines) {
    if (text_[0] == '@') {
      auto ts = tokens(text_);
      const std::string& tag = ts[0];
      if (tag == "@variables") {
        section = Section::Variables;
      } else if (tag == "@arcs") {
        section = Section::Arcs;
      } else if (tag == "@order") {
        section = Section::Order;
      } else if (tag == "@cpt") {
        section = Section::Cpt;
        PendingCpt c;
        c.line = num;
        bool after_bar = false;
        for (std::size_t i = 1; i < ts.size(); ++i) {
          if (ts[i] == "|") {
            after_bar = true;
            continue;
          }
          (after_bar ? c.tail : c.head).push_back(ts[i]);
        }
        if (!after_bar) fail(num, "@cpt needs a '|' between variables and parents");
        if (c.head.empty()) fail(num, "@cpt names no variable");
        cpts.push_back(std::move(c));
      } else if (tag == "@utility") {
        section = Section::Utility;
        PendingUtil u;
        u.line = num;
        if (ts.size() < 2) fail(num, "@utility needs a name");
        u.name = ts[1];
        bool after_bar = false;
        for (std::size_t i = 2; i < ts.size(); ++i) {
          if (ts[i] == "|") {
            after_bar = true;
            continue;
          }
          if (!after_bar) fail(num, "@utility needs a '|' before its variables");
          u.vars.push_back(ts[i]);
        }
        if (!after_bar) fail(num, "@utility needs a '|' before its variables");
        utils.push_back(std::move(u));
      } else {
        fail(num, "unknown section '" + tag + "'");
      }
      continue;
    }

    switch (section) {
      case Section::None:
        fail(num, "content before any section header");
      case Section::Variables: {
        auto ts = tokens(text_);
        if (ts.size() != 3) fail(num, "expected '<name> chance|decision <state,list>'");
        Variable v;
        v.id = static_cast<VarId>(id.variables.size());
        v.name = ts[0];
        if (ts[1] == "chance")
          v.kind = VarKind::Chance;
        else if (ts[1] == "decision")
          v.kind = VarKind::Decision;
        else
          fail(num, "variable kind must be 'chance' or 'decision'");
        for (auto& s : split_commas(ts[2])) {
          if (s.empty()) fail(num, "empty state label");
          v.states.push_back(s);
        }
        id.variables.push_back(std::move(v));
        break;
      }
      case Section::Arcs: {
        auto ts = tokens(text_);
        if (ts.size() != 3 || ts[1] != "->") fail(num, "expected '<parent> -> <child>'");
        arcs.push_back({num, ts[0], ts[2]});
        break;
      }
      case Section::Cpt: {
        for (const auto& t : tokens(text_)) {
          double x;
          if (!parse_number(t, x)) fail(num, "expected a number, got '" + t + "'");
          cpts.back().values.push_back(x);
        }
        break;
      }
      case Section::Utility: {
        for (const auto& t : tokens(text_)) {
          double x;
          if (!parse_number(t, x)) fail(num, "expected a number, got '" + t + "'");
          utils.back().values.push_back(x);
        }
        break;
      }
      case Section::Order: {
        for (const auto& t : tokens(text_)) order_names.emplace_back(num, t);
        break;
      }
    }
  }

  auto resolve = [&id](int line, const std::string& name) {
    auto v = id.find_var(name);
    if (!v) fail(line, "unknown variable '" + name + "'");
    return *v;
  };

  id.parents.assign(id.variables.size(), {});
  for (const auto& a : arcs) {
    VarId from = resolve(a.line, a.from);
    VarId to = resolve(a.line, a.to);
    id.parents[static_cast<std::size_t>(to)].push_back(from);
  }

  for (const auto& c : cpts) {
    ProbabilityBlock b;
    for (const auto& n : c.head) b.head.push_back(resolve(c.line, n));
    for (const auto& n : c.tail) b.tail.push_back(resolve(c.line, n));
    std::int64_t expect = 1;
    for (VarId v : b.head) expect *= id.card(v);
    for (VarId v : b.tail) expect *= id.card(v);
    if (static_cast<std::int64_t>(c.values.size()) != expect)
      fail(c.line, "expected " + std::to_string(expect) + " numbers, got " +
                       std::to_string(c.values.size()));
    b.table = c.values;
    // reorder chance parents to the cpt's listed tail order
    for (VarId h : b.head) {
      auto& ps = id.parents[static_cast<std::size_t>(h)];
      std::set<VarId> have(ps.begin(), ps.end());
      std::set<VarId> want(b.tail.begin(), b.tail.end());
      for (VarId other : b.head) have.erase(other);
      if (have != want)
        fail(c.line, "parents of '" + id.var(h).name + "' disagree with the @arcs section");
      ps.clear();
      for (VarId other : b.head)
        if (other != h) ps.push_back(other);
      ps.insert(ps.end(), b.tail.begin(), b.tail.end());
    }
    id.prob_blocks.push_back(std::move(b));
  }

  // strip intra-block helper parents again: block members keep only the tail
  for (auto& b : id.prob_blocks)
    for (VarId h : b.head) {
      auto& ps = id.parents[static_cast<std::size_t>(h)];
      ps.assign(b.tail.begin(), b.tail.end());
    }

  for (const auto& u : utils) {
    UtilityBlock b;
    b.name = u.name;
    for (const auto& n : u.vars) b.domain.push_back(resolve(u.line, n));
    std::int64_t expect = 1;
    for (VarId v : b.domain) expect *= id.card(v);
    if (static_cast<std::int64_t>(u.values.size()) != expect)
      fail(u.line, "expected " + std::to_string(expect) + " numbers for utility '" + u.name +
                       "', got " + std::to_string(u.values.size()));
    b.table = u.values;
    id.utilities.push_back(std::move(b));
  }

  std::vector<VarId> decisions;
  for (const auto& v : id.variables)
    if (v.kind == VarKind::Decision) decisions.push_back(v.id);
  for (const auto& [line, name] : order_names)
    id.decision_order.push_back(resolve(line, name));
  if (id.decision_order.empty() && decisions.size() == 1)
    id.decision_order = decisions;  // a single decision needs no @order
  if (decisions.size() >= 2 && id.decision_order.empty())
    throw ModelError("@order is required when the model has two or more decisions");

  id.validate();
  return id;
}

InfluenceDiagram parse_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string serialize_model(const InfluenceDiagram& id) {
  std::ostringstream os;
  os << "@variables\n";
  for (const auto& v : id.variables) {
    os << v.name << ' ' << (v.kind == VarKind::Chance ? "chance" : "decision") << ' ';
    for (std::size_t i = 0; i < v.states.size(); ++i) os << (i ? "," : "") << v.states[i];
    os << '\n';
  }
  os << "@arcs\n";
  for (const auto& v : id.variables) {
    if (v.kind == VarKind::Decision) {
      for (VarId p : id.parents[static_cast<std::size_t>(v.id)])
        os << id.var(p).name << " -> " << v.name << '\n';
    }
  }
  for (const auto& b : id.prob_blocks)
    for (VarId t : b.tail)
      for (VarId h : b.head) os << id.var(t).name << " -> " << id.var(h).name << '\n';
  for (const auto& b : id.prob_blocks) {
    os << "@cpt";
    for (VarId h : b.head) os << ' ' << id.var(h).name;
    os << " |";
    for (VarId t : b.tail) os << ' ' << id.var(t).name;
    os << '\n';
    std::int64_t head_card = 1, tail_card = 1;
    for (VarId h : b.head) head_card *= id.card(h);
    for (VarId t : b.tail) tail_card *= id.card(t);
    for (std::int64_t r = 0; r < tail_card; ++r) {
      for (std::int64_t c = 0; c < head_card; ++c)
        os << (c ? " " : "") << fmt(b.table[static_cast<std::size_t>(r * head_card + c)]);
      os << '\n';
    }
  }
  for (const auto& u : id.utilities) {
    os << "@utility " << u.name << " |";
    for (VarId v : u.domain) os << ' ' << id.var(v).name;
    os << '\n';
    for (std::size_t i = 0; i < u.table.size(); ++i) os << (i ? " " : "") << fmt(u.table[i]);
    os << '\n';
  }
  if (!id.decision_order.empty()) {
    os << "@order\n";
    for (VarId d : id.decision_order) os << id.var(d).name << '\n';
  }
  return os.str();
}

namespace {

std::string fmt9(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace

std::string report_text(const SolveReport& r, const InfluenceDiagram& id) {
  std::ostringstream os;
  os << "engine: " << r.engine << '\n';
  os << "meu: " << fmt9(r.meu) << '\n';
  for (const auto& rule : r.rules) {
    os << "rule " << id.var(rule.decision).name;
    if (!rule.domain.empty()) {
      os << " |";
      for (VarId v : rule.domain) os << ' ' << id.var(v).name;
    }
    os << ':';
    if (rule.arbitrary) {
      os << ' ' << id.var(rule.decision).states[0] << " (arbitrary)";
    } else {
      for (std::size_t i = 0; i < rule.table.size(); ++i) {
        os << ' ' << id.var(rule.decision).states[static_cast<std::size_t>(rule.table[i])];
        if (rule.tie[i]) os << "*";
      }
    }
    os << '\n';
  }
  os << "ops: mul=" << r.ops.mul << " add=" << r.ops.add << " div=" << r.ops.div
     << " max=" << r.ops.max << " total=" << r.ops.total() << '\n';
  os << "divisions: introduced=" << r.divisions_introduced
     << " executed=" << r.divisions_executed << '\n';
  if (r.has_compile)
    os << "compile ops: mul=" << r.compile_ops.mul << " add=" << r.compile_ops.add
       << " div=" << r.compile_ops.div << " max=" << r.compile_ops.max
       << " total=" << r.compile_ops.total() << '\n';
  return os.str();
}

std::string report_json(const SolveReport& r, const InfluenceDiagram& id) {
  nlohmann::ordered_json j;
  j["meu"] = r.meu;
  j["rules"] = nlohmann::ordered_json::array();
  for (const auto& rule : r.rules) {
    nlohmann::ordered_json jr;
    jr["decision"] = id.var(rule.decision).name;
    jr["domain"] = nlohmann::ordered_json::array();
    for (VarId v : rule.domain) jr["domain"].push_back(id.var(v).name);
    jr["table"] = rule.table;
    jr["ties"] = nlohmann::ordered_json::array();
    for (auto t : rule.tie) jr["ties"].push_back(t != 0);
    jr["arbitrary"] = rule.arbitrary;
    j["rules"].push_back(std::move(jr));
  }
  j["ops"] = {{"mul", r.ops.mul}, {"add", r.ops.add}, {"div", r.ops.div}, {"max", r.ops.max}};
  j["divisions"] = {{"introduced", r.divisions_introduced}, {"executed", r.divisions_executed}};
  j["engine"] = r.engine;
  if (r.has_compile)
    j["compile_ops"] = {{"mul", r.compile_ops.mul},
                        {"add", r.compile_ops.add},
                        {"div", r.compile_ops.div},
                        {"max", r.compile_ops.max}};
  return j.dump(2) + "\n";
}

}  // namespace idsolve
