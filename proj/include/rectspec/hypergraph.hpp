#pragma once

// (r,s)-uniform directed hypergraphs and their adjacency tensors.
//
// Text format:
//
//   dhg v1 r s n
//   t1 .. tr > h1 .. hs          (1-based vertex labels, one edge per line)
//
// '#' lines are comments. Within an edge the tail and head are disjoint sets.

#include <algorithm>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rectspec/tensor.hpp"
#include "rectspec/tensor_io.hpp"

namespace rectspec {

struct HyperEdge {
  std::vector<Index> tail;  // sorted, 0-based
  std::vector<Index> head;  // sorted, 0-based

  friend auto operator<=>(const HyperEdge&, const HyperEdge&) = default;
};

struct DirectedHypergraph {
  std::size_t vertex_count = 0;
  std::size_t r = 1;
  std::size_t s = 1;
  std::vector<HyperEdge> edges;
};

// Checks the invariants and returns the edge in canonical (sorted) form.
// Throws ParseError carrying `line` on violation.
inline HyperEdge validate_edge(const DirectedHypergraph& h, HyperEdge e,
                               std::size_t line = 0) {
  auto check_side = [&](std::vector<Index>& side, std::size_t want, const char* name) {
    if (side.size() != want)
      throw ParseError(line, std::string(name) + " must have exactly " +
                                 std::to_string(want) + " vertices, got " +
                                 std::to_string(side.size()));
    for (Index v : side)
      if (v >= h.vertex_count)
        throw ParseError(line, "vertex " + std::to_string(v + 1) + " outside [1.." +
                                   std::to_string(h.vertex_count) + "]");
    std::sort(side.begin(), side.end());
    if (std::adjacent_find(side.begin(), side.end()) != side.end())
      throw ParseError(line, std::string("duplicate vertex in ") + name);
  };
  check_side(e.tail, h.r, "tail");
  check_side(e.head, h.s, "head");
  std::vector<Index> shared;
  std::set_intersection(e.tail.begin(), e.tail.end(), e.head.begin(), e.head.end(),
                        std::back_inserter(shared));
  if (!shared.empty())
    throw ParseError(line, "vertex " + std::to_string(shared.front() + 1) +
                               " appears in both tail and head");
  return e;
}

inline DirectedHypergraph parse_hypergraph(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank_or_comment(line)) continue;
    header = detail::split_ws(line);
    break;
  }
  if (header.empty()) throw ParseError(lineno, "missing 'dhg v1' header");
  if (header.size() != 5 || header[0] != "dhg" || header[1] != "v1")
    throw ParseError(lineno, "header must read 'dhg v1 r s n'");
  DirectedHypergraph h;
  h.r = detail::parse_positive(header[2], lineno, "r");
  h.s = detail::parse_positive(header[3], lineno, "s");
  h.vertex_count = detail::parse_positive(header[4], lineno, "n");

  std::set<HyperEdge> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank_or_comment(line)) continue;
    const auto tok = detail::split_ws(line);
    const auto arrow = std::find(tok.begin(), tok.end(), ">");
    if (arrow == tok.end() || std::find(arrow + 1, tok.end(), ">") != tok.end())
      throw ParseError(lineno, "edge line needs exactly one '>' between tail and head");
    HyperEdge e;
    for (auto it = tok.begin(); it != arrow; ++it)
      e.tail.push_back(static_cast<Index>(detail::parse_positive(*it, lineno, "vertex") - 1));
    for (auto it = arrow + 1; it != tok.end(); ++it)
      e.head.push_back(static_cast<Index>(detail::parse_positive(*it, lineno, "vertex") - 1));
    e = validate_edge(h, std::move(e), lineno);
    if (!seen.insert(e).second) throw ParseError(lineno, "duplicate edge");
    h.edges.push_back(std::move(e));
  }
  return h;
}

inline DirectedHypergraph parse_hypergraph(const std::string& text) {
  std::istringstream in(text);
  return parse_hypergraph(in);
}

inline void write_hypergraph(std::ostream& out, const DirectedHypergraph& h) {
  out << "dhg v1 " << h.r << ' ' << h.s << ' ' << h.vertex_count << '\n';
  for (const auto& e : h.edges) {
    for (Index v : e.tail) out << (v + 1) << ' ';
    out << '>';
    for (Index v : e.head) out << ' ' << (v + 1);
    out << '\n';
  }
}

// (r,s)-order (n,n)-dimensional tensor with a 1 at every ordering of every
// edge's tail (lower indices) and head (upper indices). No factorial
// normalization: one edge contributes r! * s! unit entries.
inline RectTensor adjacency_tensor(const DirectedHypergraph& h) {
  TensorBuilder b({h.r, h.s, h.vertex_count, h.vertex_count});
  for (const auto& e : h.edges) {
    std::vector<Index> lower = e.tail;
    do {
      std::vector<Index> upper = e.head;
      do {
        b.set(lower, upper, 1.0);
      } while (std::next_permutation(upper.begin(), upper.end()));
    } while (std::next_permutation(lower.begin(), lower.end()));
  }
  RectTensor a = b.build();
  a.cache_symmetry(Symmetry::yes);
  return a;
}

struct DegreeSummary {
  std::vector<std::size_t> outdegree;  // edges with v in the tail
  std::vector<std::size_t> indegree;   // edges with v in the head

  // Vertices (0-based) with nonzero outdegree.
  std::vector<Index> tail_vertices() const { return support(outdegree); }
  // Vertices (0-based) with nonzero indegree.
  std::vector<Index> head_vertices() const { return support(indegree); }

 private:
  static std::vector<Index> support(const std::vector<std::size_t>& d) {
    std::vector<Index> out;
    for (std::size_t v = 0; v < d.size(); ++v)
      if (d[v] > 0) out.push_back(static_cast<Index>(v));
    return out;
  }
};

inline DegreeSummary degrees(const DirectedHypergraph& h) {
  DegreeSummary d{std::vector<std::size_t>(h.vertex_count, 0),
                  std::vector<std::size_t>(h.vertex_count, 0)};
  for (const auto& e : h.edges) {
    for (Index v : e.tail) ++d.outdegree[v];
    for (Index v : e.head) ++d.indegree[v];
  }
  return d;
}

}  // namespace rectspec
