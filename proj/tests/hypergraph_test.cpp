#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace rectspec;

namespace {

std::size_t error_line(const std::string& text) {
  try {
    parse_hypergraph(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 999;
}

// All six two-by-two splits of {1,2,3,4}.
const char* kSplits =
    "dhg v1 2 2 4\n"
    "1 2 > 3 4\n1 3 > 2 4\n1 4 > 2 3\n"
    "2 3 > 1 4\n2 4 > 1 3\n3 4 > 1 2\n";

double factorial(std::size_t k) { return k <= 1 ? 1.0 : k * factorial(k - 1); }

DirectedHypergraph random_hypergraph(std::mt19937_64& rng, std::size_t n, std::size_t r,
                                     std::size_t s, std::size_t edges) {
  DirectedHypergraph h{n, r, s, {}};
  std::set<HyperEdge> seen;
  for (std::size_t tries = 0; h.edges.size() < edges && tries < 50 * edges; ++tries) {
    std::vector<Index> perm(n);
    for (std::size_t v = 0; v < n; ++v) perm[v] = static_cast<Index>(v);
    std::shuffle(perm.begin(), perm.end(), rng);
    HyperEdge e{{perm.begin(), perm.begin() + r}, {perm.begin() + r, perm.begin() + r + s}};
    e = validate_edge(h, e);
    if (seen.insert(e).second) h.edges.push_back(e);
  }
  return h;
}

}  // namespace

TEST(HypergraphText, SingleEdge) {
  const auto h = parse_hypergraph("dhg v1 2 1 3\n1 2 > 3\n");
  ASSERT_EQ(h.edges.size(), 1u);
  EXPECT_EQ(h.edges[0].tail, (std::vector<Index>{0, 1}));
  EXPECT_EQ(h.edges[0].head, (std::vector<Index>{2}));
}

TEST(HypergraphText, CanonicalOrderInsideSides) {
  const auto h = parse_hypergraph("# c\ndhg v1 2 2 5\n\n5 2 > 4 1\n");
  EXPECT_EQ(h.edges[0].tail, (std::vector<Index>{1, 4}));
  EXPECT_EQ(h.edges[0].head, (std::vector<Index>{0, 3}));
}

TEST(HypergraphText, Errors) {
  EXPECT_EQ(error_line("dhg v1 2 1 3\n1 1 > 3\n"), 2u);
  EXPECT_EQ(error_line("dhg v1 2 1 3\n1 2 > 4\n"), 2u);
  EXPECT_EQ(error_line("dhg v1 2 1 3\n1 2 3\n"), 2u);
  EXPECT_EQ(error_line("dhg v1 2 1 3\n1 > 2 > 3\n"), 2u);
  EXPECT_EQ(error_line("dhg v1 2 1 3\n1 > 3\n"), 2u);
  EXPECT_EQ(error_line("dhg v1 2 1 3\n1 2 > 2\n"), 2u);
  EXPECT_EQ(error_line("dhg v1 2 1 3\n1 2 > 3\n# again\n2 1 > 3\n"), 4u);
  EXPECT_EQ(error_line("dhg v1 2 1\n"), 1u);
  EXPECT_EQ(error_line("dhg v1 2 1 3\n1 x > 3\n"), 2u);
}

TEST(HypergraphText, EmptyEdgeListAndZeroTensor) {
  const auto h = parse_hypergraph("dhg v1 1 2 4\n");
  EXPECT_TRUE(h.edges.empty());
  const auto a = adjacency_tensor(h);
  EXPECT_TRUE(a.is_zero());
  const auto d = degrees(h);
  EXPECT_EQ(d.outdegree, (std::vector<std::size_t>(4, 0)));
  EXPECT_EQ(d.indegree, (std::vector<std::size_t>(4, 0)));
  EXPECT_EQ(weak_solve(a, {2, 2}).triple.lambda, 0.0);
}

TEST(HypergraphText, RoundTrip) {
  const auto h = parse_hypergraph(kSplits);
  std::ostringstream out;
  write_hypergraph(out, h);
  const auto back = parse_hypergraph(out.str());
  EXPECT_EQ(back.edges, h.edges);
}

TEST(Adjacency, SingleEdge) {
  const auto a = adjacency_tensor(parse_hypergraph("dhg v1 2 1 3\n1 2 > 3\n"));
  EXPECT_EQ(a.shape(), (TensorShape{2, 1, 3, 3}));
  EXPECT_EQ(a.nonzeros(), 2u);
  EXPECT_EQ(a.at(std::vector<Index>{0, 1}, std::vector<Index>{2}), 1.0);
  EXPECT_EQ(a.at(std::vector<Index>{1, 0}, std::vector<Index>{2}), 1.0);
  const auto d = degrees(parse_hypergraph("dhg v1 2 1 3\n1 2 > 3\n"));
  EXPECT_EQ(d.outdegree, (std::vector<std::size_t>{1, 1, 0}));
  EXPECT_EQ(d.indegree, (std::vector<std::size_t>{0, 0, 1}));
  EXPECT_EQ(d.tail_vertices(), (std::vector<Index>{0, 1}));
  EXPECT_EQ(d.head_vertices(), (std::vector<Index>{2}));
}

TEST(Adjacency, DisjointEdgesAreReducible) {
  const auto a = adjacency_tensor(parse_hypergraph("dhg v1 2 1 6\n1 2 > 3\n4 5 > 6\n"));
  EXPECT_FALSE(is_weakly_irreducible(a));
}

TEST(Adjacency, AllSplitsOfFourVertices) {
  const auto h = parse_hypergraph(kSplits);
  const auto a = adjacency_tensor(h);
  // Fresh copy so the cached flag does not answer for us.
  const auto plain = a.with_storage(Storage::sparse);
  plain.cache_symmetry(Symmetry::unchecked);
  EXPECT_TRUE(is_partially_symmetric(plain, 0.0));
  EXPECT_TRUE(is_weakly_irreducible(a));
  EXPECT_EQ(a.nonzeros(), 24u);
  const auto d = degrees(h);
  EXPECT_EQ(d.outdegree, (std::vector<std::size_t>(4, 3)));
  EXPECT_EQ(d.indegree, (std::vector<std::size_t>(4, 3)));
}

TEST(Adjacency, AllSplitsBoundaryEigenvalue) {
  // Every vertex plays the same role, so the triple is uniform: x_i = y_j =
  // 4^{-1/4} and lambda = 24 * x_i^2 * y_j^2 = 6 at p = q = 4.
  const auto res = boundary_solve(adjacency_tensor(parse_hypergraph(kSplits)), {4, 4});
  ASSERT_TRUE(res.report.converged);
  EXPECT_NEAR(res.triple.lambda, 6.0, 1e-9);
  for (double v : res.triple.x) EXPECT_NEAR(v, std::pow(4.0, -0.25), 1e-9);
}

TEST(Properties, RandomHypergraphs) {
  std::mt19937_64 rng(50);
  for (int t = 0; t < 100; ++t) {
    const std::size_t r = 1 + rng() % 2, s = 1 + rng() % 2;
    const std::size_t n = r + s + rng() % 4;
    const auto h = random_hypergraph(rng, n, r, s, 1 + rng() % 8);
    const auto a = adjacency_tensor(h);
    const auto plain = a.with_storage(Storage::sparse);
    plain.cache_symmetry(Symmetry::unchecked);
    EXPECT_TRUE(is_partially_symmetric(plain, 0.0));
    EXPECT_TRUE(a.is_nonnegative());
    const auto d = degrees(h);
    EXPECT_EQ(std::accumulate(d.outdegree.begin(), d.outdegree.end(), std::size_t{0}),
              r * h.edges.size());
    EXPECT_EQ(std::accumulate(d.indegree.begin(), d.indegree.end(), std::size_t{0}),
              s * h.edges.size());
    const VectorPair ones{std::vector<double>(n, 1.0), std::vector<double>(n, 1.0)};
    EXPECT_EQ(evaluate_form(a, ones), h.edges.size() * factorial(r) * factorial(s));
  }
}
