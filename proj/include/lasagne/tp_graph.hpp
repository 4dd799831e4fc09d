#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lasagne/detail/text.hpp"
#include "lasagne/errors.hpp"
#include "lasagne/kg.hpp"

namespace lasagne {

enum class NodeKind { Type, Predicate };

struct GraphNode {
  NodeKind kind = NodeKind::Type;
  std::string id;

  auto operator<=>(const GraphNode&) const = default;
};

inline std::string prefixed_id(const GraphNode& node) {
  return (node.kind == NodeKind::Type ? "tp:" : "pr:") + node.id;
}

// Undirected graph over entity types and predicates. Non-self edges connect
// a type to a predicate (bipartite up to self-loops); every node carries a
// self-loop, so no node is isolated. Node order is types sorted by id, then
// predicates sorted by id.
struct TypePredicateGraph {
  std::vector<GraphNode> nodes;
  std::vector<std::vector<std::size_t>> adjacency;  // sorted, self-loop included
  std::size_t type_count = 0;

  std::size_t node_count() const { return nodes.size(); }

  std::optional<std::size_t> index_of(NodeKind kind, std::string_view id) const {
    std::size_t begin = kind == NodeKind::Type ? 0 : type_count;
    std::size_t end = kind == NodeKind::Type ? type_count : nodes.size();
    auto first = nodes.begin() + static_cast<std::ptrdiff_t>(begin);
    auto last = nodes.begin() + static_cast<std::ptrdiff_t>(end);
    auto it = std::lower_bound(first, last, id, [](const GraphNode& n, std::string_view v) {
      return n.id < v;
    });
    if (it == last || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
  }

  // Undirected edge count, self-loops included.
  std::size_t edge_count() const {
    std::size_t directed = 0, self = 0;
    for (std::size_t i = 0; i < adjacency.size(); ++i) {
      directed += adjacency[i].size();
      self += std::count(adjacency[i].begin(), adjacency[i].end(), i);
    }
    return (directed - self) / 2 + self;
  }
};

namespace detail {

inline TypePredicateGraph assemble_graph(const std::set<std::string>& type_ids,
                                         const std::set<std::string>& predicate_ids,
                                         const std::set<std::pair<std::string, std::string>>& tp_pr_edges) {
  TypePredicateGraph g;
  g.type_count = type_ids.size();
  g.nodes.reserve(type_ids.size() + predicate_ids.size());
  for (const auto& id : type_ids) g.nodes.push_back({NodeKind::Type, id});
  for (const auto& id : predicate_ids) g.nodes.push_back({NodeKind::Predicate, id});

  std::vector<std::set<std::size_t>> neighbours(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) neighbours[i].insert(i);
  for (const auto& [tp, pr] : tp_pr_edges) {
    std::size_t a = *g.index_of(NodeKind::Type, tp);
    std::size_t b = *g.index_of(NodeKind::Predicate, pr);
    neighbours[a].insert(b);
    neighbours[b].insert(a);
  }

  g.adjacency.reserve(neighbours.size());
  for (auto& set : neighbours) g.adjacency.emplace_back(set.begin(), set.end());
  return g;
}

// "tp:id" / "pr:id" -> node; anything else is a parse error.
inline GraphNode parse_prefixed(const std::string& path, std::size_t line_no,
                                std::string_view token) {
  if (token.size() > 3 && token.substr(0, 3) == "tp:")
    return {NodeKind::Type, std::string(token.substr(3))};
  if (token.size() > 3 && token.substr(0, 3) == "pr:")
    return {NodeKind::Predicate, std::string(token.substr(3))};
  throw ParseError(path, line_no, "expected tp:- or pr:-prefixed node id, got `" +
                                      std::string(token) + "`");
}

}  // namespace detail

// A triple (s, p, o) links every type of s to p, and p to every type of o.
inline TypePredicateGraph build_tp_graph(const KnowledgeGraph& kg) {
  std::set<std::pair<std::string, std::string>> edges;
  for (const Triple& t : kg.triples()) {
    for (const auto& tp : kg.types_of(t.subject)) edges.emplace(tp, t.predicate);
    for (const auto& tp : kg.types_of(t.object)) edges.emplace(tp, t.predicate);
  }
  return detail::assemble_graph(kg.type_ids(), kg.predicate_ids(), edges);
}

// One undirected edge per line, `node_a<TAB>node_b`, each endpoint written
// with its tp:/pr: prefix; self-loops included. Edges are emitted with
// index_a <= index_b in ascending order, so dumps are byte-stable.
inline std::string dump_graph(const TypePredicateGraph& g) {
  std::string out;
  for (std::size_t i = 0; i < g.adjacency.size(); ++i) {
    for (std::size_t j : g.adjacency[i]) {
      if (j < i) continue;
      out += prefixed_id(g.nodes[i]);
      out += '\t';
      out += prefixed_id(g.nodes[j]);
      out += '\n';
    }
  }
  return out;
}

inline void save_graph(const TypePredicateGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << dump_graph(g);
  if (!out) throw IoError("failed writing " + path);
}

inline TypePredicateGraph load_graph(const std::string& path) {
  std::set<std::string> types, predicates;
  std::set<std::pair<std::string, std::string>> edges;

  detail::for_each_line(path, [&](std::size_t line_no, std::string_view line) {
    auto cols = detail::split(line, '\t');
    if (cols.size() != 2)
      throw ParseError(path, line_no,
                       "expected 2 tab-separated fields, got " + std::to_string(cols.size()));
    GraphNode a = detail::parse_prefixed(path, line_no, cols[0]);
    GraphNode b = detail::parse_prefixed(path, line_no, cols[1]);
    for (const GraphNode* n : {&a, &b})
      (n->kind == NodeKind::Type ? types : predicates).insert(n->id);

    if (a == b) return;  // self-loops are guaranteed by assembly anyway
    if (a.kind == b.kind)
      throw ParseError(path, line_no, "edge joins two " +
                                          std::string(a.kind == NodeKind::Type ? "type" : "predicate") +
                                          " nodes; graph must be bipartite");
    if (a.kind != NodeKind::Type) std::swap(a, b);
    edges.emplace(a.id, b.id);
  });

  return detail::assemble_graph(types, predicates, edges);
}

}  // namespace lasagne
