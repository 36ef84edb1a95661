#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cumbound/rng.hpp"

namespace cumbound {

/// Small connected pattern graph H (at most 5 vertices, no isolated vertices).
class PatternGraph {
 public:
  static constexpr int kMaxVertices = 5;

  PatternGraph() : PatternGraph(2, {{0, 1}}) {}
  PatternGraph(int vertex_count, std::vector<std::pair<int, int>> edges);

  static PatternGraph edge() { return PatternGraph(2, {{0, 1}}); }
  /// Path with three vertices and two edges.
  static PatternGraph path2() { return PatternGraph(3, {{0, 1}, {1, 2}}); }
  static PatternGraph triangle() { return PatternGraph(3, {{0, 1}, {0, 2}, {1, 2}}); }
  static PatternGraph cycle(int length);
  static PatternGraph complete(int vertices);
  static PatternGraph star(int leaves);

  /// Accepts "edge", "P2", "triangle", "C4", "C5", "K4", "K5", "star3", "star4",
  /// or an explicit edge list such as "0-1,1-2,2-0".
  static PatternGraph parse(std::string_view text);

  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  bool adjacent(int a, int b) const;
  /// Number of vertex permutations preserving the edge set.
  std::int64_t automorphisms() const { return automorphisms_; }
  std::string name() const;

  friend bool operator==(const PatternGraph& a, const PatternGraph& b) {
    return a.vertex_count_ == b.vertex_count_ && a.edges_ == b.edges_;
  }

 private:
  int vertex_count_;
  std::vector<std::pair<int, int>> edges_;
  std::int64_t automorphisms_ = 1;
};

/// Simple undirected graph on vertices 0..n-1 stored as adjacency bitsets.
class Graph {
 public:
  explicit Graph(int n);

  int vertex_count() const { return n_; }
  int words() const { return words_; }
  void add_edge(int a, int b);
  bool has_edge(int a, int b) const;
  std::span<const std::uint64_t> row(int v) const {
    return {rows_.data() + static_cast<std::size_t>(v) * words_, static_cast<std::size_t>(words_)};
  }
  int degree(int v) const;
  std::int64_t edge_count() const;

 private:
  int n_;
  int words_;
  std::vector<std::uint64_t> rows_;
};

Graph sample_gnp_graph(int n, double p, Rng& rng);
/// m distinct edges chosen uniformly (partial Fisher-Yates over edge indices).
Graph sample_gnm_graph(int n, std::int64_t m, Rng& rng);

/// Number of subgraphs of g isomorphic to h (unlabeled copies): injective
/// edge-preserving maps V(h) -> V(g) divided by |Aut(h)|.
std::int64_t count_subgraphs(const Graph& g, const PatternGraph& h);

std::int64_t sample_gnp_subgraph_count(int n, double p, const PatternGraph& h, Rng& rng);
std::int64_t sample_gnm_subgraph_count(int n, std::int64_t m, const PatternGraph& h, Rng& rng);

struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact mean and variance of the triangle count in G(n, p).
MeanVariance gnp_triangle_moments_exact(int n, double p);

/// Partner array of a uniform pair partition of {0, .., 2n-1}, built by
/// repeatedly matching a remaining point with a uniformly chosen other one.
std::vector<int> sample_pair_partition(int n, Rng& rng);
/// Crossings of a pair partition, by comparing every pair of chords.
std::int64_t count_crossings(std::span<const int> partner);
std::int64_t sample_pair_partition_crossings(int n, Rng& rng);

/// Exact crossing distribution over all (2n-1)!! pair partitions, n <= 8.
std::map<std::int64_t, std::uint64_t> enumerate_pair_partitions_crossings(int n);

/// Mean n(n-1)/6 and variance n(n-1)(n+3)/45 of the crossing count.
MeanVariance crossings_moments_exact(int n);

/// log det of a real p x p Wishart(n) matrix as sum_{i=1}^{p} log chi^2_{n-i+1}.
double sample_wishart_logdet(std::int64_t n, std::int64_t p, Rng& rng);

enum class UKernel {
  /// h(x, y) = x + y + xy: centered, h_1(x) = x, sigma_1^2 = 1, Var h = 3.
  LinearPlusProduct,
  /// h(x, y) = (x - y)^2 / 2: U_n is the sample variance.
  HalfSquaredDifference,
};

std::string_view to_string(UKernel kernel);
UKernel parse_kernel(std::string_view name);

struct KernelMoments {
  double mean = 0.0;
  double sigma1sq = 0.0;
  double sigma2sq = 0.0;
};

/// Moments of the built-in kernels under i.i.d. standard normal input.
KernelMoments kernel_moments(UKernel kernel);

double ustatistic(std::span<const double> xs, UKernel kernel);
double sample_ustatistic(std::int64_t n, UKernel kernel, Rng& rng);

/// Var U_n = 4 sigma_1^2 (n-2) / (n (n-1)) + 2 sigma_2^2 / (n (n-1)).
double ustat_variance(std::int64_t n, double sigma1sq, double sigma2sq);

enum class SummandDist { Rademacher, CenteredExponential, Uniform };

std::string_view to_string(SummandDist dist);
SummandDist parse_summand_dist(std::string_view name);

/// K such that |E X_i^j| <= j! K^{j-2} sigma_i^2 for all j >= 3 (gamma = 0).
double bernstein_constant(SummandDist dist, std::span<const double> sigmas);

/// One draw of sum X_i / sqrt(sum sigma_i^2), X_i = sigma_i * (unit-variance draw).
double sample_independent_sum(std::span<const double> sigmas, SummandDist dist, Rng& rng);

enum class SimKind { GnpSubgraph, GnmSubgraph, Crossings, WishartLogDet, UStatistic, IndependentSum };

std::string_view to_string(SimKind kind);
SimKind parse_sim_kind(std::string_view name);

/// One Monte Carlo model with its replicate count and RNG identity.
struct SimSpec {
  SimKind kind = SimKind::Crossings;
  std::int64_t n = 1;
  double p = 0.5;             // GnpSubgraph edge probability
  std::int64_t m = 0;         // GnmSubgraph edge count
  std::int64_t dim = 1;       // WishartLogDet: p
  PatternGraph pattern;       // Gnp/Gnm
  UKernel kernel = UKernel::LinearPlusProduct;
  SummandDist dist = SummandDist::Rademacher;
  std::vector<double> sigmas; // IndependentSum; empty means n unit sigmas
  std::int64_t replicates = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  void validate() const;
  std::vector<double> effective_sigmas() const;
};

/// Draws of one SimSpec plus an FNV-1a digest of the value bit patterns.
struct SampleBatch {
  std::vector<double> values;
  SimSpec spec;
  std::uint64_t digest = 0;
};

double draw_one(const SimSpec& spec, Rng& rng);

/// Replicate r draws from Rng(seed, stream, r); the result does not depend on
/// `threads`.
SampleBatch run_batch(const SimSpec& spec, int threads = 1);

std::uint64_t fnv1a_digest(std::span<const double> values);

}  // namespace cumbound
