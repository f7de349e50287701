#include "relgraph/join_graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace relgraph {

namespace {

std::pair<std::string, std::string> split_qualified(const std::string& name) {
  auto dot = name.find('.');
  return {name.substr(0, dot), name.substr(dot + 1)};
}

std::string cond_alias(const Term& t) { return split_qualified(*t.column).first; }

// Renders a comparison with each alias replaced through `rename`, reordering
// the sides so the rendering is alias-assignment independent.
std::string render_renamed(const Comparison& c, const std::map<std::string, std::string>& rename) {
  auto term_str = [&](const Term& t) {
    if (!t.is_column()) return std::string("#") + kind_name(t.constant.kind()) + ":" + t.constant.to_string();
    auto [alias, col] = split_qualified(*t.column);
    auto it = rename.find(alias);
    return (it == rename.end() ? alias : it->second) + "." + col;
  };
  std::string l = term_str(c.lhs), r = term_str(c.rhs);
  CmpOp op = c.op;
  if (c.lhs.is_column() && c.rhs.is_column() && r < l) {
    std::swap(l, r);
    op = flip_cmp_op(op);
  }
  return l + cmp_op_text(op) + r;
}

std::string render_filters(const std::vector<Comparison>& filters, const std::map<std::string, std::string>& rename) {
  std::vector<std::string> parts;
  parts.reserve(filters.size());
  for (const auto& f : filters) parts.push_back(render_renamed(f, rename));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) out += "{" + p + "}";
  return out;
}

}  // namespace

int JoinGraph::find_vertex(const std::string& alias) const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].alias == alias) return int(i);
  return -1;
}

std::string JoinGraph::encoding() const {
  std::map<std::string, std::string> identity;
  std::vector<std::string> vlines;
  for (size_t i = 0; i < vertices.size(); ++i)
    vlines.push_back(vertices[i].alias + "=" + vertices[i].base + render_filters(filters[i], identity));
  std::sort(vlines.begin(), vlines.end());

  std::vector<std::string> elines;
  for (const auto& e : edges) {
    std::string a = vertices[e.u].alias, b = vertices[e.v].alias;
    if (b < a) std::swap(a, b);
    elines.push_back(a + "~" + b + "|" + (e.type == JoinType::Inner ? "inner" : "outer") + "|" +
                     render_renamed(e.cond, identity));
  }
  std::sort(elines.begin(), elines.end());

  std::string out;
  for (const auto& l : vlines) out += l + ";";
  out += "/";
  for (const auto& l : elines) out += l + ";";
  return out;
}

std::string JoinGraph::to_json() const {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (size_t i = 0; i < vertices.size(); ++i) {
    nlohmann::json v{{"alias", vertices[i].alias}, {"table", vertices[i].base}};
    if (!filters[i].empty()) {
      v["filters"] = nlohmann::json::array();
      for (const auto& f : filters[i]) v["filters"].push_back(f.render());
    }
    j["vertices"].push_back(std::move(v));
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : edges)
    j["edges"].push_back({{"left", vertices[e.u].alias},
                          {"right", vertices[e.v].alias},
                          {"type", e.type == JoinType::Inner ? "inner" : "outer"},
                          {"condition", e.cond.render()}});
  return j.dump();
}

std::string JoinGraph::to_dot() const {
  std::ostringstream out;
  out << "graph join_graph {\n";
  for (size_t i = 0; i < vertices.size(); ++i) {
    out << "  \"" << vertices[i].alias << "\" [label=\"" << vertices[i].alias << ": " << vertices[i].base;
    for (const auto& f : filters[i]) out << "\\n" << f.render();
    out << "\"];\n";
  }
  for (const auto& e : edges) {
    out << "  \"" << vertices[e.u].alias << "\" -- \"" << vertices[e.v].alias << "\" [label=\""
        << e.cond.render() << "\"";
    if (e.type == JoinType::Outer) out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

JoinGraph build_join_graph(const ParsedQuery& q) {
  JoinGraph g;
  for (const auto& f : q.from_list) g.vertices.push_back({f.base, f.alias});
  g.filters.resize(g.vertices.size());

  for (const auto& c : q.where) {
    std::vector<std::string> aliases;
    if (c.lhs.is_column()) aliases.push_back(cond_alias(c.lhs));
    if (c.rhs.is_column()) aliases.push_back(cond_alias(c.rhs));
    if (aliases.size() == 2 && aliases[0] != aliases[1]) {
      int a = g.find_vertex(aliases[0]), b = g.find_vertex(aliases[1]);
      JoinEdge e;
      e.u = std::min(a, b);
      e.v = std::max(a, b);
      e.cond = c;
      g.edges.push_back(std::move(e));
    } else {
      g.filters[size_t(g.find_vertex(aliases[0]))].push_back(c);
    }
  }

  // connectivity
  std::vector<int> parent(g.vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& e : g.edges) parent[find(e.u)] = find(e.v);
  std::map<int, std::vector<std::string>> groups;
  for (size_t i = 0; i < g.vertices.size(); ++i) groups[find(int(i))].push_back(g.vertices[i].alias);
  if (groups.size() > 1) {
    std::vector<std::vector<std::string>> parts;
    std::string msg = "query is disconnected (cartesian product):";
    for (auto& [root, aliases] : groups) {
      msg += " {";
      for (size_t i = 0; i < aliases.size(); ++i) msg += (i ? "," : "") + aliases[i];
      msg += "}";
      parts.push_back(std::move(aliases));
    }
    throw DisconnectedQueryError(msg, std::move(parts));
  }
  return g;
}

namespace {

// ---- canonical labeling of induced subgraphs ----

struct Labeled {
  std::string key;
  JoinGraph pattern;
  struct Variant {
    std::vector<int> map;    // pattern vertex -> graph vertex id
    std::vector<int> edges;  // graph edge ids aligned with pattern.edges
  };
  std::vector<Variant> variants;  // all arrangements achieving the minimal key
};

constexpr size_t kMaxArrangements = 5040;

// Enumerates vertex orderings of `subset` where same-base vertices permute;
// returns the canonical pattern plus every ordering achieving the minimal key.
Labeled canonical_label(const JoinGraph& g, const std::vector<int>& subset, const std::vector<int>& edge_ids) {
  // group subset vertices by base name, bases sorted
  std::map<std::string, std::vector<int>> by_base;
  for (int v : subset) by_base[g.vertices[v].base].push_back(v);

  std::vector<std::vector<int>> groups;
  for (auto& [base, vs] : by_base) {
    std::sort(vs.begin(), vs.end());
    groups.push_back(vs);
  }

  Labeled out;
  size_t tried = 0;
  std::vector<std::vector<int>> best_orders;

  std::vector<std::vector<int>> perms = groups;  // mutated by next_permutation per group
  auto arrangement = [&]() {
    std::vector<int> order;
    for (const auto& grp : perms) order.insert(order.end(), grp.begin(), grp.end());
    return order;
  };

  std::string best_key;
  std::function<void(size_t)> iterate = [&](size_t gi) {
    if (tried >= kMaxArrangements) return;
    if (gi == perms.size()) {
      ++tried;
      std::vector<int> order = arrangement();
      std::map<std::string, std::string> rename;
      std::map<int, int> pos;
      for (size_t i = 0; i < order.size(); ++i) {
        rename[g.vertices[order[i]].alias] = "@" + std::to_string(i);
        pos[order[i]] = int(i);
      }
      std::string key;
      for (size_t i = 0; i < order.size(); ++i)
        key += "@" + std::to_string(i) + "=" + g.vertices[order[i]].base +
               render_filters(g.filters[order[i]], rename) + ";";
      key += "/";
      std::vector<std::pair<std::string, int>> elines;
      for (int eid : edge_ids) {
        const auto& e = g.edges[eid];
        int a = pos[e.u], b = pos[e.v];
        if (b < a) std::swap(a, b);
        elines.push_back({std::to_string(a) + "~" + std::to_string(b) + "|" +
                              (e.type == JoinType::Inner ? "inner" : "outer") + "|" + render_renamed(e.cond, rename),
                          eid});
      }
      std::sort(elines.begin(), elines.end());
      for (const auto& [line, eid] : elines) key += line + ";";

      if (best_key.empty() || key < best_key) {
        best_key = key;
        best_orders.clear();
      }
      if (key == best_key) best_orders.push_back(order);
      return;
    }
    std::sort(perms[gi].begin(), perms[gi].end());
    do {
      iterate(gi + 1);
      if (tried >= kMaxArrangements) return;
    } while (std::next_permutation(perms[gi].begin(), perms[gi].end()));
  };
  iterate(0);

  out.key = best_key;

  // pattern from the first minimal ordering
  const std::vector<int>& order = best_orders.front();
  std::map<std::string, int> base_count, base_seen;
  for (int v : order) base_count[g.vertices[v].base]++;
  std::set<std::string> used;
  std::map<std::string, std::string> rename;
  std::map<int, int> pos;
  for (size_t i = 0; i < order.size(); ++i) {
    const std::string& base = g.vertices[order[i]].base;
    std::string alias = base_count[base] == 1 ? base : base + std::to_string(++base_seen[base]);
    while (used.count(alias)) alias += "_";
    used.insert(alias);
    out.pattern.vertices.push_back({base, alias});
    rename[g.vertices[order[i]].alias] = alias;
    pos[order[i]] = int(i);
  }
  out.pattern.filters.resize(order.size());

  auto requalify = [&](const Comparison& c) {
    Comparison cc = c;
    for (Term* t : {&cc.lhs, &cc.rhs}) {
      if (!t->is_column()) continue;
      auto [alias, col] = split_qualified(*t->column);
      t->column = rename.at(alias) + "." + col;
    }
    if (cc.lhs.is_column() && cc.rhs.is_column() && *cc.rhs.column < *cc.lhs.column) {
      std::swap(cc.lhs, cc.rhs);
      cc.op = flip_cmp_op(cc.op);
    }
    return cc;
  };

  for (size_t i = 0; i < order.size(); ++i) {
    for (const auto& f : g.filters[order[i]]) out.pattern.filters[i].push_back(requalify(f));
    std::sort(out.pattern.filters[i].begin(), out.pattern.filters[i].end(),
              [](const Comparison& a, const Comparison& b) { return a.render() < b.render(); });
  }

  // pattern edges in canonical (sorted-line) order, recorded per variant
  for (const auto& ord : best_orders) {
    std::map<std::string, std::string> vrename;
    std::map<int, int> vpos;
    for (size_t i = 0; i < ord.size(); ++i) {
      vrename[g.vertices[ord[i]].alias] = "@" + std::to_string(i);
      vpos[ord[i]] = int(i);
    }
    std::vector<std::pair<std::string, int>> elines;
    for (int eid : edge_ids) {
      const auto& e = g.edges[eid];
      int a = vpos[e.u], b = vpos[e.v];
      if (b < a) std::swap(a, b);
      elines.push_back({std::to_string(a) + "~" + std::to_string(b) + "|" +
                            (e.type == JoinType::Inner ? "inner" : "outer") + "|" + render_renamed(e.cond, vrename),
                        eid});
    }
    std::sort(elines.begin(), elines.end());

    Labeled::Variant var;
    var.map = ord;
    for (const auto& [line, eid] : elines) var.edges.push_back(eid);
    out.variants.push_back(std::move(var));

    if (out.pattern.edges.empty()) {
      for (const auto& [line, eid] : elines) {
        const auto& e = g.edges[eid];
        JoinEdge pe;
        pe.u = std::min(vpos[e.u], vpos[e.v]);
        pe.v = std::max(vpos[e.u], vpos[e.v]);
        pe.type = e.type;
        pe.cond = requalify(e.cond);
        out.pattern.edges.push_back(std::move(pe));
      }
    }
  }
  return out;
}

// All connected induced subgraphs with >= 1 edge. `size_limit` trims the
// search on oversized graphs (single edges only).
std::vector<Labeled> enumerate_induced(const JoinGraph& g, size_t size_limit) {
  std::vector<Labeled> out;
  size_t n = g.vertices.size();
  if (n < 2) return out;

  if (size_limit <= 2 || n > 31) {
    // pair subsets straight off the edge list; avoids the 2^n scan
    std::set<std::pair<int, int>> pairs;
    for (const auto& e : g.edges) pairs.insert({e.u, e.v});
    for (const auto& [u, v] : pairs) {
      std::vector<int> subset{u, v};
      std::vector<int> edge_ids;
      for (size_t ei = 0; ei < g.edges.size(); ++ei)
        if (g.edges[ei].u == u && g.edges[ei].v == v) edge_ids.push_back(int(ei));
      out.push_back(canonical_label(g, subset, edge_ids));
    }
    return out;
  }

  std::vector<uint32_t> adj(n, 0);
  for (const auto& e : g.edges) {
    adj[e.u] |= 1u << e.v;
    adj[e.v] |= 1u << e.u;
  }

  auto connected = [&](uint32_t mask) {
    int start = -1;
    for (size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) { start = int(i); break; }
    if (start < 0) return false;
    uint32_t seen = 1u << start, frontier = seen;
    while (frontier) {
      uint32_t next = 0;
      for (size_t i = 0; i < n; ++i)
        if (frontier & (1u << i)) next |= adj[i] & mask;
      next &= ~seen;
      seen |= next;
      frontier = next;
    }
    return seen == mask;
  };

  for (uint32_t mask = 1; mask < (1u << n); ++mask) {
    size_t bits = size_t(__builtin_popcount(mask));
    if (bits < 2 || bits > size_limit) continue;
    if (!connected(mask)) continue;
    std::vector<int> subset;
    std::vector<int> edge_ids;
    for (size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) subset.push_back(int(i));
    for (size_t ei = 0; ei < g.edges.size(); ++ei)
      if ((mask & (1u << g.edges[ei].u)) && (mask & (1u << g.edges[ei].v))) edge_ids.push_back(int(ei));
    if (edge_ids.empty()) continue;
    out.push_back(canonical_label(g, subset, edge_ids));
  }
  return out;
}

std::string map_signature(const JoinGraph& g, const std::vector<int>& map) {
  std::string out;
  for (int v : map) out += g.vertices[v].alias + ",";
  return out;
}

}  // namespace

std::string SharedSubgraph::encoding() const {
  return pattern.encoding() + "#" + std::to_string(map1.size());
}

CandidateSearch common_subgraph_candidates(const JoinGraph& g1, const JoinGraph& g2, const MatchOptions& opts) {
  CandidateSearch result;
  size_t cap = opts.max_exhaustive_vertices;
  size_t limit1 = g1.vertices.size() > cap ? 1 : g1.vertices.size();
  size_t limit2 = g2.vertices.size() > cap ? 1 : g2.vertices.size();
  result.capped = g1.vertices.size() > cap || g2.vertices.size() > cap;

  // size_limit of 1 would yield nothing; single edges span 2 vertices
  auto occ1 = enumerate_induced(g1, limit1 < 2 ? 2 : limit1);
  auto occ2 = enumerate_induced(g2, limit2 < 2 ? 2 : limit2);

  std::map<std::string, std::vector<const Labeled*>> by_key;
  for (const auto& o : occ2) by_key[o.key].push_back(&o);

  std::set<std::string> seen;
  for (const auto& o1 : occ1) {
    auto it = by_key.find(o1.key);
    if (it == by_key.end()) continue;
    for (const Labeled* o2 : it->second) {
      for (const auto& var2 : o2->variants) {
        SharedSubgraph cand;
        cand.pattern = o1.pattern;
        cand.map1 = o1.variants.front().map;
        cand.edges1 = o1.variants.front().edges;
        cand.map2 = var2.map;
        cand.edges2 = var2.edges;
        std::string sig = map_signature(g1, cand.map1) + "|" + map_signature(g2, cand.map2);
        if (seen.insert(sig).second) result.candidates.push_back(std::move(cand));
      }
    }
  }

  std::stable_sort(result.candidates.begin(), result.candidates.end(),
                   [&](const SharedSubgraph& a, const SharedSubgraph& b) {
                     if (a.pattern.edges.size() != b.pattern.edges.size())
                       return a.pattern.edges.size() > b.pattern.edges.size();
                     if (a.map1.size() != b.map1.size()) return a.map1.size() > b.map1.size();
                     std::string ka = a.pattern.encoding(), kb = b.pattern.encoding();
                     if (ka != kb) return ka < kb;
                     std::string ma = map_signature(g1, a.map1) + "|" + map_signature(g2, a.map2);
                     std::string mb = map_signature(g1, b.map1) + "|" + map_signature(g2, b.map2);
                     return ma < mb;
                   });

  if (result.capped) {
    // keep only candidates not strictly contained in another candidate
    std::vector<SharedSubgraph> maximal;
    for (const auto& c : result.candidates) {
      std::set<int> vs(c.map1.begin(), c.map1.end());
      bool contained = false;
      for (const auto& other : result.candidates) {
        if (other.map1.size() <= c.map1.size()) continue;
        std::set<int> os(other.map1.begin(), other.map1.end());
        if (std::includes(os.begin(), os.end(), vs.begin(), vs.end())) {
          contained = true;
          break;
        }
      }
      if (!contained) maximal.push_back(c);
    }
    result.candidates = std::move(maximal);
  }
  return result;
}

namespace {

std::vector<NonSharedPart> split_parts(const JoinGraph& g, const std::vector<int>& shared_vertices) {
  std::set<int> shared(shared_vertices.begin(), shared_vertices.end());
  size_t n = g.vertices.size();

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& e : g.edges)
    if (!shared.count(e.u) && !shared.count(e.v)) parent[find(e.u)] = find(e.v);

  std::map<int, NonSharedPart> comps;
  for (size_t i = 0; i < n; ++i)
    if (!shared.count(int(i))) comps[find(int(i))].vertices.push_back(int(i));

  for (size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    bool su = shared.count(e.u) > 0, sv = shared.count(e.v) > 0;
    if (su && sv) continue;  // inside the shared subgraph (induced-complete)
    if (!su && !sv) comps[find(e.u)].internal_edges.push_back(int(ei));
    else comps[find(su ? e.v : e.u)].connecting_edges.push_back(int(ei));
  }

  std::vector<NonSharedPart> out;
  for (auto& [root, part] : comps) {
    std::sort(part.vertices.begin(), part.vertices.end());
    std::sort(part.internal_edges.begin(), part.internal_edges.end());
    std::sort(part.connecting_edges.begin(), part.connecting_edges.end());
    out.push_back(std::move(part));
  }
  std::sort(out.begin(), out.end(),
            [&](const NonSharedPart& a, const NonSharedPart& b) {
              return g.vertices[a.vertices[0]].alias < g.vertices[b.vertices[0]].alias;
            });
  return out;
}

}  // namespace

std::string Decomposition::encoding() const {
  std::string out = shared.pattern.encoding() + "!";
  for (int v : shared.map1) out += std::to_string(v) + ",";
  out += "!";
  for (int v : shared.map2) out += std::to_string(v) + ",";
  return out;
}

DecompositionSearch enumerate_decompositions(const JoinGraph& g1, const JoinGraph& g2, const MatchOptions& opts) {
  auto search = common_subgraph_candidates(g1, g2, opts);
  if (search.candidates.empty())
    throw NoCommonJoinError("queries share no common join");

  DecompositionSearch out;
  out.capped = search.capped;
  for (auto& cand : search.candidates) {
    Decomposition d;
    d.parts1 = split_parts(g1, cand.map1);
    d.parts2 = split_parts(g2, cand.map2);
    d.shared = std::move(cand);
    out.decompositions.push_back(std::move(d));
  }
  return out;
}

std::vector<PatternGroup> find_pattern_groups(const std::vector<const JoinGraph*>& queries,
                                              const MatchOptions& opts) {
  std::map<std::string, PatternGroup> groups;
  for (size_t qi = 0; qi < queries.size(); ++qi) {
    const JoinGraph& g = *queries[qi];
    size_t limit = g.vertices.size() > opts.max_exhaustive_vertices ? 2 : g.vertices.size();
    for (auto& occ : enumerate_induced(g, limit)) {
      auto& grp = groups[occ.key];
      if (grp.pattern.vertices.empty()) grp.pattern = occ.pattern;
      PatternOccurrence po;
      po.query_index = qi;
      po.map = occ.variants.front().map;
      po.edges = occ.variants.front().edges;
      grp.occurrences.push_back(std::move(po));
    }
  }

  std::vector<PatternGroup> out;
  for (auto& [key, grp] : groups) out.push_back(std::move(grp));
  std::sort(out.begin(), out.end(), [](const PatternGroup& a, const PatternGroup& b) {
    if (a.pattern.edges.size() != b.pattern.edges.size()) return a.pattern.edges.size() > b.pattern.edges.size();
    if (a.pattern.vertices.size() != b.pattern.vertices.size())
      return a.pattern.vertices.size() > b.pattern.vertices.size();
    return a.pattern.encoding() < b.pattern.encoding();
  });
  return out;
}

std::string join_step_signature(const JoinGraph& g, const std::vector<int>& edge_ids) {
  std::map<std::string, std::string> rename;
  for (const auto& v : g.vertices) rename[v.alias] = v.base;
  std::vector<std::string> lines;
  lines.reserve(edge_ids.size());
  for (int eid : edge_ids) lines.push_back(render_renamed(g.edges[eid].cond, rename));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) out += (i ? "&" : "") + lines[i];
  return out;
}

bool reconstructs_origin(const JoinGraph& origin, const std::vector<int>& shared_map,
                         const std::vector<int>& shared_edges, const std::vector<NonSharedPart>& parts) {
  std::multiset<int> vertices(shared_map.begin(), shared_map.end());
  std::multiset<int> edges(shared_edges.begin(), shared_edges.end());
  for (const auto& p : parts) {
    vertices.insert(p.vertices.begin(), p.vertices.end());
    edges.insert(p.internal_edges.begin(), p.internal_edges.end());
    edges.insert(p.connecting_edges.begin(), p.connecting_edges.end());
  }
  if (vertices.size() != origin.vertices.size() || edges.size() != origin.edges.size()) return false;
  for (size_t i = 0; i < origin.vertices.size(); ++i)
    if (vertices.count(int(i)) != 1) return false;
  for (size_t i = 0; i < origin.edges.size(); ++i)
    if (edges.count(int(i)) != 1) return false;
  return true;
}

}  // namespace relgraph
