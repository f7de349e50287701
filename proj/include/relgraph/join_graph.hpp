#pragma once

#include <string>
#include <vector>

#include "relgraph/dsl.hpp"
#include "relgraph/exec.hpp"

namespace relgraph {

struct TableInstance {
  std::string base;   // stored table (or view) name
  std::string alias;  // unique within one graph
};

enum class JoinType { Inner, Outer };

/// One join predicate between two table instances. Multigraph: several
/// conditions between the same pair are separate edges.
struct JoinEdge {
  int u = 0, v = 0;  // vertex indices, u < v
  JoinType type = JoinType::Inner;
  Comparison cond;  // column terms hold qualified alias.column names
};

/// Undirected multigraph of the table instances and join predicates of one
/// query, with single-table conjuncts kept as per-vertex filters.
struct JoinGraph {
  std::vector<TableInstance> vertices;
  std::vector<JoinEdge> edges;
  std::vector<std::vector<Comparison>> filters;  // indexed per vertex

  int find_vertex(const std::string& alias) const;
  const TableInstance& vertex(int i) const { return vertices[size_t(i)]; }

  /// Stable alias-preserving encoding; equal encodings mean equal graphs.
  std::string encoding() const;

  std::string to_json() const;
  std::string to_dot() const;
};

struct DisconnectedQueryError : std::runtime_error {
  DisconnectedQueryError(std::string msg, std::vector<std::vector<std::string>> parts)
      : std::runtime_error(std::move(msg)), partitions(std::move(parts)) {}
  std::vector<std::vector<std::string>> partitions;  // alias groups
};

/// Builds the join graph of a parsed query. Two-alias conjuncts become edges,
/// one-alias conjuncts become vertex filters. Rejects disconnected queries.
JoinGraph build_join_graph(const ParsedQuery& q);

struct MatchOptions {
  size_t max_exhaustive_vertices = 12;  // beyond this, fall back to maximal candidates
};

/// A common connected subgraph of two queries together with one concrete
/// occurrence in each: base tables, join types, conditions and vertex filters
/// all agree up to alias renaming. Occurrences are induced subgraphs, so a
/// decomposition can account for every original edge.
struct SharedSubgraph {
  JoinGraph pattern;          // canonical aliases derived from base names
  std::vector<int> map1;      // pattern vertex -> vertex id in g1
  std::vector<int> map2;      // pattern vertex -> vertex id in g2
  std::vector<int> edges1;    // matched edge ids in g1, aligned with pattern.edges
  std::vector<int> edges2;

  std::string encoding() const;
};

struct CandidateSearch {
  std::vector<SharedSubgraph> candidates;
  bool capped = false;  // true when the exhaustive search limit was exceeded
};

/// All shared-subgraph candidates between two queries, every mapping pair
/// included (self-joins can match several positions). Largest first, then
/// canonical order.
CandidateSearch common_subgraph_candidates(const JoinGraph& g1, const JoinGraph& g2,
                                           const MatchOptions& opts = {});

/// One connected component left after removing a shared subgraph, plus the
/// edges that attach it to the shared subgraph.
struct NonSharedPart {
  std::vector<int> vertices;          // vertex ids in the origin graph
  std::vector<int> internal_edges;    // edge ids fully inside this part
  std::vector<int> connecting_edges;  // edge ids with one endpoint in the shared subgraph
};

struct Decomposition {
  SharedSubgraph shared;
  std::vector<NonSharedPart> parts1;
  std::vector<NonSharedPart> parts2;

  std::string encoding() const;
};

struct NoCommonJoinError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DecompositionSearch {
  std::vector<Decomposition> decompositions;
  bool capped = false;
};

/// One decomposition per candidate mapping pair. Throws NoCommonJoinError when
/// the queries share no join.
DecompositionSearch enumerate_decompositions(const JoinGraph& g1, const JoinGraph& g2,
                                             const MatchOptions& opts = {});

/// Occurrences of one shared pattern across a set of queries; an occurrence is
/// a vertex subset (mapping variants collapsed), so counting matches intuition.
struct PatternOccurrence {
  size_t query_index = 0;
  std::vector<int> map;    // pattern vertex -> graph vertex id
  std::vector<int> edges;  // matched edge ids, aligned with pattern.edges
};

struct PatternGroup {
  JoinGraph pattern;
  std::vector<PatternOccurrence> occurrences;
};

/// Groups every connected induced subgraph (with at least one edge) that
/// occurs anywhere in the query set by its alias-insensitive pattern.
std::vector<PatternGroup> find_pattern_groups(const std::vector<const JoinGraph*>& queries,
                                              const MatchOptions& opts = {});

/// Test/diagnostic helper: rebuilds one side of a decomposition (shared branch
/// plus parts plus connecting edges) and reports whether it equals the origin.
bool reconstructs_origin(const JoinGraph& origin, const std::vector<int>& shared_map,
                         const std::vector<int>& shared_edges, const std::vector<NonSharedPart>& parts);

/// Signature of a join step with aliases replaced by base-table names, so the
/// same physical join is countable across queries (C1.c_id=SS1.c_id and
/// C2.c_id=SS2.c_id both sign as C.c_id=SS.c_id).
std::string join_step_signature(const JoinGraph& g, const std::vector<int>& edge_ids);

}  // namespace relgraph
