#include "nilwalk/model.hpp"

#include <fstream>
#include <json.hpp>

namespace nilwalk {

namespace {

using nlohmann::json;

Rational jrat(const json& j, const std::string& where) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) return Rational::from_string(j.get<std::string>());
  } catch (const std::exception& e) {
    throw model_error(where + ": " + e.what());
  }
  throw model_error(where + ": expected an integer or a \"p/q\" string");
}

GroupElement jelem(const json& j, const AlgebraPtr& alg, const std::string& where) {
  if (!j.is_array() || j.size() != alg->dim())
    throw model_error(where + ": expected an array of " + std::to_string(alg->dim()) +
                      " rational coordinates");
  GroupElement x = group_identity(*alg);
  for (std::size_t i = 0; i < alg->dim(); ++i)
    x[Eigen::Index(i)] = jrat(j[i], where + "[" + std::to_string(i) + "]");
  return x;
}

}  // namespace

ModelConfig load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw model_error("cannot open model file " + path.string());
  json root;
  try {
    in >> root;
  } catch (const std::exception& e) {
    throw model_error(path.string() + ": JSON parse error: " + std::string(e.what()));
  }

  ModelConfig mc;
  mc.id = root.value("id", path.stem().string());

  // algebra block
  if (!root.contains("algebra")) throw model_error("algebra: block missing");
  const json& ja = root["algebra"];
  const int step = ja.value("step", 0);
  if (!ja.contains("layer_dims")) throw model_error("algebra.layer_dims: missing");
  std::vector<int> dims = ja["layer_dims"].get<std::vector<int>>();
  std::vector<std::tuple<int, int, int, Rational>> entries;
  for (std::size_t k = 0; ja.contains("brackets") && k < ja["brackets"].size(); ++k) {
    const json& je = ja["brackets"][k];
    const std::string where = "algebra.brackets[" + std::to_string(k) + "]";
    entries.emplace_back(je.value("i", 0), je.value("j", 0), je.value("k", 0),
                         jrat(je.at("c"), where + ".c"));
  }
  try {
    mc.algebra = std::make_shared<StratifiedAlgebra>(step, dims, entries);
  } catch (const algebra_error& e) {
    throw model_error("algebra: " + std::string(e.what()));
  }

  // graph block
  if (!root.contains("graph")) throw model_error("graph: block missing");
  const json& jg = root["graph"];
  std::vector<std::string> vertices = jg.at("vertices").get<std::vector<std::string>>();
  std::map<std::string, std::size_t> vidx;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vidx.count(vertices[i]))
      throw model_error("graph.vertices: duplicate id '" + vertices[i] + "'");
    vidx[vertices[i]] = i;
  }
  std::map<std::string, std::size_t> eidx;
  const json& jedges = jg.at("edges");
  for (std::size_t e = 0; e < jedges.size(); ++e) {
    const std::string id = jedges[e].value("id", "");
    if (id.empty()) throw model_error("graph.edges[" + std::to_string(e) + "].id: missing");
    if (eidx.count(id))
      throw model_error("graph.edges[" + std::to_string(e) + "]: duplicate id '" + id + "'");
    eidx[id] = e;
  }
  std::vector<Edge> edges;
  for (std::size_t e = 0; e < jedges.size(); ++e) {
    const json& je = jedges[e];
    const std::string where = "graph.edges[" + std::to_string(e) + "]";
    auto vat = [&](const char* key) {
      const std::string v = je.value(key, "");
      auto it = vidx.find(v);
      if (it == vidx.end())
        throw model_error(where + "." + key + ": unknown vertex '" + v + "'");
      return it->second;
    };
    const std::string inv = je.value("inverse", "");
    auto iit = eidx.find(inv);
    if (iit == eidx.end())
      throw model_error(where + ".inverse: unknown edge '" + inv + "'");
    edges.push_back(Edge{je.value("id", ""), vat("origin"), vat("terminus"), iit->second,
                         jrat(je.at("p"), where + ".p")});
  }
  mc.graph = std::make_shared<QuotientGraph>(vertices, edges);
  auto bad = mc.graph->validate();
  if (!bad.empty()) {
    std::string msg = "graph: validation failed:";
    for (const auto& b : bad) msg += "\n  - " + b;
    throw model_error(msg);
  }
  mc.m = invariant_measure(*mc.graph);

  // realization block
  if (!root.contains("realization")) throw model_error("realization: block missing");
  const json& jr = root["realization"];
  std::vector<GroupElement> hols(mc.graph->edge_count(), group_identity(*mc.algebra));
  if (!jr.contains("holonomies")) throw model_error("realization.holonomies: missing");
  for (const auto& [eid, jv] : jr["holonomies"].items()) {
    auto it = eidx.find(eid);
    if (it == eidx.end())
      throw model_error("realization.holonomies: unknown edge '" + eid + "'");
    hols[it->second] = jelem(jv, mc.algebra, "realization.holonomies." + eid);
  }
  mc.anchor = jr.value("anchor", vertices.front());
  if (!vidx.count(mc.anchor))
    throw model_error("realization.anchor: unknown vertex '" + mc.anchor + "'");
  const std::size_t anchor = vidx.at(mc.anchor);

  std::optional<std::vector<GroupElement>> higher;
  if (jr.contains("positions")) {
    std::vector<GroupElement> pos(mc.graph->vertex_count(), group_identity(*mc.algebra));
    for (const auto& [vid, jv] : jr["positions"].items()) {
      auto it = vidx.find(vid);
      if (it == vidx.end())
        throw model_error("realization.positions: unknown vertex '" + vid + "'");
      pos[it->second] = jelem(jv, mc.algebra, "realization.positions." + vid);
    }
    higher = std::move(pos);
  }

  const bool harmonic_flag = jr.value("harmonic", !higher.has_value());
  try {
    // With harmonic=true, explicit positions act as higher-layer overrides
    // (the solver fixes layer 1); otherwise the harmonic reference uses the
    // zero default.
    mc.harmonic = std::make_shared<Realization>(
        solve_modified_harmonic(mc.algebra, *mc.graph, mc.m, hols, anchor,
                                harmonic_flag && higher ? &*higher : nullptr));
    if (harmonic_flag) {
      mc.realization = mc.harmonic;
      mc.realization_is_harmonic = true;
    } else {
      if (!higher)
        throw model_error("realization: harmonic=false requires explicit positions");
      mc.realization = std::make_shared<Realization>(mc.algebra, *mc.graph, *higher, hols);
      mc.realization_is_harmonic = false;
    }
  } catch (const realization_error& e) {
    throw model_error("realization: " + std::string(e.what()));
  }

  // optional function block
  if (root.contains("f")) {
    const json& jf = root["f"];
    if (jf.is_string()) {
      mc.f = parse_polynomial(mc.algebra, jf.get<std::string>());
    } else {
      Polynomial p(group_space(mc.algebra));
      for (std::size_t k = 0; k < jf.size(); ++k) {
        const json& jt = jf[k];
        const std::string where = "f[" + std::to_string(k) + "]";
        std::vector<uint32_t> exps = jt.at("multi_index").get<std::vector<uint32_t>>();
        if (exps.size() != mc.algebra->dim())
          throw model_error(where + ".multi_index: wrong length");
        p.add_term(MultiIndex(exps), jrat(jt.at("coeff"), where + ".coeff"));
      }
      mc.f = p;
    }
  }

  // run parameters
  if (root.contains("run")) {
    const json& jp = root["run"];
    if (jp.contains("t")) mc.run.t = jrat(jp["t"], "run.t");
    if (jp.contains("n")) mc.run.ns = parse_sweep(jp["n"].get<std::string>());
    if (jp.contains("dmax")) mc.run.dmax = jp["dmax"].get<int>();
    if (jp.contains("N")) mc.run.N = jp["N"].get<int>();
    if (jp.contains("seed")) mc.run.seed = jp["seed"].get<uint64_t>();
    if (jp.contains("C")) mc.run.C = jrat(jp["C"], "run.C");
    if (jp.contains("b")) mc.run.b = jrat(jp["b"], "run.b");
    if (jp.contains("lambda")) mc.run.lambda = jrat(jp["lambda"], "run.lambda");
    if (jp.contains("box")) mc.run.box = jp["box"].get<double>();
  }
  return mc;
}

Polynomial parse_polynomial(const AlgebraPtr& algebra, const std::string& text) {
  auto sp = group_space(algebra);
  Polynomial out(sp);
  // split into signed terms at top level
  std::vector<std::pair<int, std::string>> terms;
  std::string cur;
  int sign = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == ' ') continue;
    if ((c == '+' || c == '-') && !cur.empty()) {
      terms.emplace_back(sign, cur);
      cur.clear();
      sign = c == '-' ? -1 : 1;
    } else if ((c == '+' || c == '-') && cur.empty()) {
      sign = (c == '-') ? -sign : sign;
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) terms.emplace_back(sign, cur);
  if (terms.empty()) throw model_error("polynomial: empty expression");

  for (const auto& [sg, term] : terms) {
    Rational coeff(sg);
    MultiIndex I(algebra->dim());
    std::size_t pos = 0;
    bool any = false;
    while (pos < term.size()) {
      std::size_t star = term.find('*', pos);
      std::string factor = term.substr(pos, star == std::string::npos ? star : star - pos);
      pos = star == std::string::npos ? term.size() : star + 1;
      if (factor.empty()) throw model_error("polynomial: empty factor in '" + term + "'");
      if (factor[0] == 'x') {
        std::size_t caret = factor.find('^');
        std::string var = factor.substr(1, caret == std::string::npos ? caret : caret - 1);
        std::size_t vi = var.empty() ? 0 : std::size_t(std::stoul(var)) - 1;
        if (vi >= algebra->dim())
          throw model_error("polynomial: variable x" + std::to_string(vi + 1) +
                            " exceeds dimension " + std::to_string(algebra->dim()));
        uint32_t k = 1;
        if (caret != std::string::npos) k = uint32_t(std::stoul(factor.substr(caret + 1)));
        I[vi] += k;
        any = true;
      } else {
        coeff *= Rational::from_string(factor);
        any = true;
      }
    }
    if (!any) throw model_error("polynomial: cannot parse term '" + term + "'");
    out.add_term(I, coeff);
  }
  return out;
}

std::vector<long> parse_sweep(const std::string& text) {
  std::vector<long> ns;
  const std::size_t dots = text.find("..");
  if (dots != std::string::npos) {
    const long lo = std::stol(text.substr(0, dots));
    const long hi = std::stol(text.substr(dots + 2));
    if (lo < 1 || hi < lo) throw model_error("sweep: need 1 <= A <= B in 'A..B'");
    for (long n = lo; n <= hi; n *= 2) ns.push_back(n);
    return ns;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    ns.push_back(std::stol(text.substr(pos, comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (ns.empty()) throw model_error("sweep: empty");
  return ns;
}

}  // namespace nilwalk
