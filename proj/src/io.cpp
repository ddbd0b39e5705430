#include "driftlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace driftlab::io {

namespace {

Rational rational_of(const Json& v, std::string_view what) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number()) return parse_rational(v.dump());
  throw InputError(std::string(what) + ": expected a number or \"p/q\" string");
}

template <typename T>
T scalar_of(const Json& v, std::string_view what) {
  if constexpr (std::is_same_v<T, double>) {
    if (v.is_number()) return v.get<double>();
  }
  return ScalarTraits<T>::from_rational(rational_of(v, what));
}

template <typename T>
Json scalar_json(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x;
  } else {
    return format_rational(x);
  }
}

const Json& member(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw InputError(std::string("chain JSON: missing \"") + key + "\"");
  return doc.at(key);
}

}  // namespace

NumericMode chain_mode(const Json& doc) {
  if (!doc.is_object() || !doc.contains("mode")) return NumericMode::rational;
  return parse_mode(doc.at("mode").get<std::string>());
}

template <typename T>
Chain<T> chain_from_json(const Json& doc) {
  const Json& states = member(doc, "states");
  const Json& rows = member(doc, "rows");
  if (!states.is_array() || !rows.is_array()) throw InputError("chain JSON: states and rows must be arrays");

  std::vector<StateInfo> info;
  std::unordered_map<std::string, StateIndex> index;
  for (const auto& s : states) {
    StateInfo st;
    st.id = member(s, "id").get<std::string>();
    st.fitness = rational_of(member(s, "fitness"), "fitness");
    st.optimal = s.value("optimal", false);
    if (!index.emplace(st.id, info.size()).second) throw InputError("chain JSON: duplicate state id '" + st.id + "'");
    info.push_back(std::move(st));
  }
  std::vector<std::vector<Transition<T>>> out(info.size());
  for (const auto& r : rows) {
    const auto from = member(r, "from").get<std::string>();
    const auto to = member(r, "to").get<std::string>();
    const auto f = index.find(from);
    const auto t = index.find(to);
    if (f == index.end() || t == index.end()) {
      throw InputError("chain JSON: transition " + from + " -> " + to + " names an unknown state");
    }
    out[f->second].push_back({t->second, scalar_of<T>(member(r, "p"), "p")});
  }
  bool any_flag = false;
  for (const auto& s : states) any_flag = any_flag || s.contains("optimal");
  if (!any_flag && !info.empty()) {
    Rational best = info.front().fitness;
    for (const auto& s : info) best = std::max(best, s.fitness);
    for (auto& s : info) s.optimal = s.fitness == best;
  }
  return Chain<T>(std::move(info), std::move(out));
}

template <typename T>
Json chain_to_json(const Chain<T>& chain) {
  Json doc;
  doc["mode"] = std::string(to_string(mode_of<T>()));
  Json states = Json::array();
  Json rows = Json::array();
  for (StateIndex i = 0; i < chain.size(); ++i) {
    const auto& s = chain.state(i);
    states.push_back({{"id", s.id}, {"fitness", format_rational(s.fitness)}, {"optimal", s.optimal}});
    for (const auto& t : chain.row(i)) {
      rows.push_back({{"from", s.id}, {"to", chain.state(t.to).id}, {"p", scalar_json(t.probability)}});
    }
  }
  doc["states"] = std::move(states);
  doc["rows"] = std::move(rows);
  return doc;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json read_json_file(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

template <typename T>
std::string level_graph_dot(const Chain<T>& chain, const LevelPartition& partition, const LevelGraph& graph) {
  std::ostringstream os;
  os << "digraph levels {\n  rankdir=BT;\n";
  for (LevelIndex k = 0; k < partition.level_count(); ++k) {
    const auto members = partition.level(k);
    os << "  S" << k << " [label=\"S_" << k << "\\nf=" << format_rational(partition.fitness(k)) << "\\n";
    if (members.size() <= 4) {
      for (std::size_t i = 0; i < members.size(); ++i) os << (i ? " " : "") << chain.state(members[i]).id;
    } else {
      os << members.size() << " states";
    }
    os << "\"];\n";
  }
  for (const auto& [from, to] : graph.arcs()) os << "  S" << from << " -> S" << to << ";\n";
  os << "}\n";
  return os.str();
}

template <typename T>
std::string coefficient_csv(const CoefficientTable<T>& table) {
  std::ostringstream os;
  os << "k,l,value,method,direction\n";
  const std::string tail = "," + std::string(to_string(table.method())) + "," + std::string(to_string(table.direction()));
  for (LevelIndex k = 2; k <= table.top(); ++k) {
    for (LevelIndex l = 1; l < k; ++l) os << k << ',' << l << ',' << format_scalar(table(k, l)) << tail << '\n';
  }
  return os.str();
}

template <typename T>
Json bound_report_json(const BoundReport<T>& r) {
  Json doc;
  doc["direction"] = std::string(to_string(r.direction));
  doc["method"] = r.method;
  doc["mode"] = std::string(to_string(r.mode));
  if (r.start_level) doc["start_level"] = *r.start_level;
  if (!r.start_distribution.empty()) {
    Json dist = Json::array();
    for (const auto& q : r.start_distribution) dist.push_back(format_scalar(q));
    doc["start_distribution"] = std::move(dist);
  }
  doc["value"] = r.value.format();
  if (r.value.finite()) doc["value_float"] = ScalarTraits<T>::to_double(r.value.value());
  Json terms = Json::array();
  for (const auto& t : r.terms) {
    terms.push_back({{"level", t.level},
                     {"coefficient", format_scalar(t.coefficient)},
                     {"climb", format_scalar(t.climb)},
                     {"contribution", t.contribution.format()}});
  }
  doc["terms"] = std::move(terms);
  return doc;
}

template <typename T>
std::string bound_report_csv(const BoundReport<T>& r) {
  std::ostringstream os;
  os << "level,coefficient,climb,contribution\n";
  for (const auto& t : r.terms) {
    os << t.level << ',' << format_scalar(t.coefficient) << ',' << format_scalar(t.climb) << ','
       << t.contribution.format() << '\n';
  }
  return os.str();
}

Json instance_to_json(const KnapsackInstance& instance) {
  Json doc;
  doc["id"] = instance.id();
  doc["n"] = instance.n();
  Json v = Json::array(), w = Json::array();
  for (const auto& x : instance.values()) v.push_back(format_rational(x));
  for (const auto& x : instance.weights()) w.push_back(format_rational(x));
  doc["values"] = std::move(v);
  doc["weights"] = std::move(w);
  doc["capacity"] = instance.capacity() ? format_rational(*instance.capacity()) : std::string("inf");
  return doc;
}

KnapsackInstance instance_from_json(const Json& doc) {
  auto list = [&](const char* key) {
    std::vector<Rational> out;
    for (const auto& x : member(doc, key)) out.push_back(rational_of(x, key));
    return out;
  };
  std::optional<Rational> capacity;
  const Json& c = member(doc, "capacity");
  if (!(c.is_string() && c.get<std::string>() == "inf")) capacity = rational_of(c, "capacity");
  KnapsackInstance inst(doc.value("id", std::string("custom")), list("values"), list("weights"), capacity);
  if (doc.contains("n") && doc.at("n").get<std::size_t>() != inst.n()) {
    throw InputError("instance JSON: n disagrees with the number of values");
  }
  return inst;
}

#define DRIFTLAB_INSTANTIATE(T)                                                                       \
  template Chain<T> chain_from_json(const Json&);                                                     \
  template Json chain_to_json(const Chain<T>&);                                                       \
  template std::string level_graph_dot(const Chain<T>&, const LevelPartition&, const LevelGraph&);    \
  template std::string coefficient_csv(const CoefficientTable<T>&);                                   \
  template Json bound_report_json(const BoundReport<T>&);                                             \
  template std::string bound_report_csv(const BoundReport<T>&);

DRIFTLAB_INSTANTIATE(Rational)
DRIFTLAB_INSTANTIATE(double)

#undef DRIFTLAB_INSTANTIATE

}  // namespace driftlab::io
