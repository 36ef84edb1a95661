#include "cumbound/simulators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "cumbound/parallel.hpp"

namespace cumbound {

// ---------------------------------------------------------------- patterns

PatternGraph::PatternGraph(int vertex_count, std::vector<std::pair<int, int>> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  if (vertex_count_ < 2 || vertex_count_ > kMaxVertices)
    throw std::invalid_argument("PatternGraph: vertex count must lie in 2..5");
  for (auto& [a, b] : edges_) {
    if (a < 0 || b < 0 || a >= vertex_count_ || b >= vertex_count_ || a == b)
      throw std::invalid_argument("PatternGraph: invalid edge");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw std::invalid_argument("PatternGraph: duplicate edge");

  // connected, hence no isolated vertices
  std::vector<int> component(static_cast<std::size_t>(vertex_count_));
  std::iota(component.begin(), component.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto [a, b] : edges_) {
      const int lo = std::min(component[a], component[b]);
      if (component[a] != lo || component[b] != lo) {
        component[a] = component[b] = lo;
        changed = true;
      }
    }
  }
  for (int c : component)
    if (c != 0) throw std::invalid_argument("PatternGraph: pattern must be connected");

  std::vector<int> perm(static_cast<std::size_t>(vertex_count_));
  std::iota(perm.begin(), perm.end(), 0);
  automorphisms_ = 0;
  do {
    bool preserves = true;
    for (auto [a, b] : edges_)
      if (!adjacent(perm[a], perm[b])) {
        preserves = false;
        break;
      }
    if (preserves) ++automorphisms_;
  } while (std::next_permutation(perm.begin(), perm.end()));
}

bool PatternGraph::adjacent(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(a, b));
}

PatternGraph PatternGraph::cycle(int length) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < length; ++i) e.emplace_back(i, (i + 1) % length);
  return PatternGraph(length, std::move(e));
}

PatternGraph PatternGraph::complete(int vertices) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < vertices; ++i)
    for (int j = i + 1; j < vertices; ++j) e.emplace_back(i, j);
  return PatternGraph(vertices, std::move(e));
}

PatternGraph PatternGraph::star(int leaves) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return PatternGraph(leaves + 1, std::move(e));
}

PatternGraph PatternGraph::parse(std::string_view text) {
  if (text == "edge") return edge();
  if (text == "P2") return path2();
  if (text == "triangle") return triangle();
  if (text == "C4") return cycle(4);
  if (text == "C5") return cycle(5);
  if (text == "K4") return complete(4);
  if (text == "K5") return complete(5);
  if (text == "star3") return star(3);
  if (text == "star4") return star(4);

  std::vector<std::pair<int, int>> e;
  int max_vertex = -1;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view item = text.substr(pos, comma - pos);
    const std::size_t dash = item.find('-');
    if (dash == std::string_view::npos || dash == 0 || dash + 1 == item.size())
      throw std::invalid_argument("PatternGraph: cannot parse '" + std::string(text) + "'");
    int a = 0, b = 0;
    try {
      a = std::stoi(std::string(item.substr(0, dash)));
      b = std::stoi(std::string(item.substr(dash + 1)));
    } catch (const std::exception&) {
      throw std::invalid_argument("PatternGraph: cannot parse '" + std::string(text) + "'");
    }
    e.emplace_back(a, b);
    max_vertex = std::max({max_vertex, a, b});
    pos = comma + 1;
  }
  return PatternGraph(max_vertex + 1, std::move(e));
}

std::string PatternGraph::name() const {
  if (*this == edge()) return "edge";
  if (*this == path2()) return "P2";
  if (*this == triangle()) return "triangle";
  std::string out;
  for (auto [a, b] : edges_) {
    if (!out.empty()) out += ',';
    out += std::to_string(a) + "-" + std::to_string(b);
  }
  return out;
}

// ------------------------------------------------------------------ graphs

Graph::Graph(int n) : n_(n), words_((n + 63) / 64), rows_(static_cast<std::size_t>(n) * ((n + 63) / 64), 0) {
  if (n < 1) throw std::invalid_argument("Graph: n must be >= 1");
}

void Graph::add_edge(int a, int b) {
  rows_[static_cast<std::size_t>(a) * words_ + b / 64] |= std::uint64_t{1} << (b % 64);
  rows_[static_cast<std::size_t>(b) * words_ + a / 64] |= std::uint64_t{1} << (a % 64);
}

bool Graph::has_edge(int a, int b) const {
  return (rows_[static_cast<std::size_t>(a) * words_ + b / 64] >> (b % 64)) & 1U;
}

int Graph::degree(int v) const {
  int d = 0;
  for (std::uint64_t w : row(v)) d += std::popcount(w);
  return d;
}

std::int64_t Graph::edge_count() const {
  std::int64_t twice = 0;
  for (int v = 0; v < n_; ++v) twice += degree(v);
  return twice / 2;
}

Graph sample_gnp_graph(int n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("G(n,p): p must lie in [0,1]");
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) g.add_edge(i, j);
  return g;
}

Graph sample_gnm_graph(int n, std::int64_t m, Rng& rng) {
  const std::int64_t total = static_cast<std::int64_t>(n) * (n - 1) / 2;
  if (m < 0 || m > total) throw std::invalid_argument("G(n,m): m out of range");
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  for (std::int64_t t = 0; t < m; ++t) {
    const auto r = t + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total - t)));
    std::swap(pairs[static_cast<std::size_t>(t)], pairs[static_cast<std::size_t>(r)]);
  }
  Graph g(n);
  for (std::int64_t t = 0; t < m; ++t) g.add_edge(pairs[t].first, pairs[t].second);
  return g;
}

namespace {

std::int64_t count_triangles(const Graph& g) {
  // sum over edges of common neighbours counts each triangle three times
  std::int64_t thrice = 0;
  for (int i = 0; i < g.vertex_count(); ++i) {
    const auto ri = g.row(i);
    for (int j = i + 1; j < g.vertex_count(); ++j) {
      if (!g.has_edge(i, j)) continue;
      const auto rj = g.row(j);
      for (int w = 0; w < g.words(); ++w) thrice += std::popcount(ri[w] & rj[w]);
    }
  }
  return thrice / 3;
}

class InjectionCounter {
 public:
  InjectionCounter(const Graph& g, const PatternGraph& h) : g_(g), h_(h) {
    // BFS order so every vertex after the first has a placed neighbour
    const int l = h.vertex_count();
    std::vector<bool> seen(static_cast<std::size_t>(l), false);
    order_.push_back(0);
    seen[0] = true;
    for (std::size_t head = 0; head < order_.size(); ++head)
      for (int v = 0; v < l; ++v)
        if (!seen[v] && h.adjacent(order_[head], v)) {
          seen[v] = true;
          order_.push_back(v);
        }
    earlier_.resize(static_cast<std::size_t>(l));
    for (int t = 1; t < l; ++t)
      for (int s = 0; s < t; ++s)
        if (h.adjacent(order_[t], order_[s])) earlier_[t].push_back(s);
    image_.assign(static_cast<std::size_t>(l), -1);
    used_.assign(static_cast<std::size_t>(g.words()), 0);
    scratch_.assign(static_cast<std::size_t>(l) * g.words(), 0);
  }

  std::int64_t count() {
    std::int64_t total = 0;
    for (int v = 0; v < g_.vertex_count(); ++v) {
      place(0, v);
      total += extend(1);
      unplace(0);
    }
    return total;
  }

 private:
  void place(int t, int v) {
    image_[t] = v;
    used_[v / 64] |= std::uint64_t{1} << (v % 64);
  }
  void unplace(int t) {
    const int v = image_[t];
    used_[v / 64] &= ~(std::uint64_t{1} << (v % 64));
  }

  std::int64_t extend(int t) {
    if (t == h_.vertex_count()) return 1;
    const int words = g_.words();
    std::uint64_t* cand = scratch_.data() + static_cast<std::size_t>(t) * words;
    const auto first = g_.row(image_[earlier_[t][0]]);
    std::copy(first.begin(), first.end(), cand);
    for (std::size_t e = 1; e < earlier_[t].size(); ++e) {
      const auto r = g_.row(image_[earlier_[t][e]]);
      for (int w = 0; w < words; ++w) cand[w] &= r[w];
    }
    std::int64_t total = 0;
    for (int w = 0; w < words; ++w) {
      std::uint64_t bits = cand[w] & ~used_[w];
      while (bits) {
        const int v = w * 64 + std::countr_zero(bits);
        bits &= bits - 1;
        place(t, v);
        total += extend(t + 1);
        unplace(t);
      }
    }
    return total;
  }

  const Graph& g_;
  const PatternGraph& h_;
  std::vector<int> order_;
  std::vector<std::vector<int>> earlier_;
  std::vector<int> image_;
  std::vector<std::uint64_t> used_;
  std::vector<std::uint64_t> scratch_;
};

}  // namespace

std::int64_t count_subgraphs(const Graph& g, const PatternGraph& h) {
  if (h == PatternGraph::edge()) return g.edge_count();
  if (h == PatternGraph::path2()) {
    std::int64_t total = 0;
    for (int v = 0; v < g.vertex_count(); ++v) {
      const std::int64_t d = g.degree(v);
      total += d * (d - 1) / 2;
    }
    return total;
  }
  if (h == PatternGraph::triangle()) return count_triangles(g);
  if (h.vertex_count() > g.vertex_count()) return 0;
  return InjectionCounter(g, h).count() / h.automorphisms();
}

std::int64_t sample_gnp_subgraph_count(int n, double p, const PatternGraph& h, Rng& rng) {
  return count_subgraphs(sample_gnp_graph(n, p, rng), h);
}

std::int64_t sample_gnm_subgraph_count(int n, std::int64_t m, const PatternGraph& h, Rng& rng) {
  return count_subgraphs(sample_gnm_graph(n, m, rng), h);
}

MeanVariance gnp_triangle_moments_exact(int n, double p) {
  if (n < 3) throw std::invalid_argument("gnp_triangle_moments_exact: n must be >= 3");
  const double nd = n;
  const double c3 = nd * (nd - 1) * (nd - 2) / 6.0;
  const double c4 = c3 * (nd - 3) / 4.0;
  const double p3 = p * p * p;
  const double p5 = p3 * p * p;
  const double p6 = p3 * p3;
  // pairs of triangles sharing one edge: C(n,4) vertex sets, 6 pairs each
  return {c3 * p3, c3 * (p3 - p6) + 12.0 * c4 * (p5 - p6)};
}

// --------------------------------------------------------------- crossings

std::vector<int> sample_pair_partition(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("pair partition: n must be >= 1");
  std::vector<int> pool(static_cast<std::size_t>(2 * n));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> partner(pool.size(), -1);
  while (!pool.empty()) {
    const int a = pool.back();
    pool.pop_back();
    const auto r = static_cast<std::size_t>(rng.below(pool.size()));
    const int b = pool[r];
    pool[r] = pool.back();
    pool.pop_back();
    partner[a] = b;
    partner[b] = a;
  }
  return partner;
}

std::int64_t count_crossings(std::span<const int> partner) {
  std::vector<std::pair<int, int>> chords;
  for (int i = 0; i < static_cast<int>(partner.size()); ++i)
    if (i < partner[i]) chords.emplace_back(i, partner[i]);
  std::int64_t crossings = 0;
  for (std::size_t s = 0; s < chords.size(); ++s) {
    const auto [a, b] = chords[s];
    for (std::size_t t = s + 1; t < chords.size(); ++t) {
      const auto [c, d] = chords[t];
      if ((a < c && c < b && b < d) || (c < a && a < d && d < b)) ++crossings;
    }
  }
  return crossings;
}

std::int64_t sample_pair_partition_crossings(int n, Rng& rng) {
  return count_crossings(sample_pair_partition(n, rng));
}

namespace {

// Always matches the smallest free point i. Every matched point above i is
// then the right end of a chord whose left end lies below i, so the new chord
// (i, j) crosses exactly the matched points strictly between i and j.
void enumerate_matchings(unsigned matched, int points, std::int64_t crossings,
                         std::map<std::int64_t, std::uint64_t>& out) {
  if (matched == (1U << points) - 1U) {
    ++out[crossings];
    return;
  }
  const int i = std::countr_one(matched);
  for (int j = i + 1; j < points; ++j) {
    if (matched & (1U << j)) continue;
    const unsigned between = ((1U << j) - 1U) & ~((1U << (i + 1)) - 1U);
    enumerate_matchings(matched | (1U << i) | (1U << j), points, crossings + std::popcount(matched & between), out);
  }
}

}  // namespace

std::map<std::int64_t, std::uint64_t> enumerate_pair_partitions_crossings(int n) {
  if (n < 1 || n > 8) throw std::invalid_argument("enumerate_pair_partitions_crossings: n must lie in 1..8");
  std::map<std::int64_t, std::uint64_t> out;
  enumerate_matchings(0U, 2 * n, 0, out);
  return out;
}

MeanVariance crossings_moments_exact(int n) {
  if (n < 1) throw std::invalid_argument("crossings_moments_exact: n must be >= 1");
  const double nd = n;
  return {nd * (nd - 1) / 6.0, nd * (nd - 1) * (nd + 3) / 45.0};
}

// ----------------------------------------------------------------- wishart

double sample_wishart_logdet(std::int64_t n, std::int64_t p, Rng& rng) {
  if (p < 1 || p > n) throw std::invalid_argument("sample_wishart_logdet: requires 1 <= p <= n");
  double total = 0.0;
  for (std::int64_t i = 1; i <= p; ++i) total += rng.log_chi_square(static_cast<double>(n - i + 1));
  return total;
}

// ------------------------------------------------------------ U-statistics

std::string_view to_string(UKernel kernel) {
  switch (kernel) {
    case UKernel::LinearPlusProduct: return "x+y+xy";
    case UKernel::HalfSquaredDifference: return "(x-y)^2/2";
  }
  return "?";
}

UKernel parse_kernel(std::string_view name) {
  if (name == "x+y+xy" || name == "default") return UKernel::LinearPlusProduct;
  if (name == "(x-y)^2/2" || name == "variance") return UKernel::HalfSquaredDifference;
  throw std::invalid_argument("unknown U-statistic kernel '" + std::string(name) + "'");
}

KernelMoments kernel_moments(UKernel kernel) {
  switch (kernel) {
    case UKernel::LinearPlusProduct: return {0.0, 1.0, 3.0};
    case UKernel::HalfSquaredDifference: return {1.0, 0.5, 2.0};
  }
  throw std::invalid_argument("kernel_moments: unknown kernel");
}

double ustatistic(std::span<const double> xs, UKernel kernel) {
  const auto n = static_cast<double>(xs.size());
  if (xs.size() < 2) throw std::invalid_argument("ustatistic: needs at least two observations");
  double s1 = 0.0, s2 = 0.0;
  for (double x : xs) {
    s1 += x;
    s2 += x * x;
  }
  const double pairs = 0.5 * n * (n - 1.0);
  switch (kernel) {
    case UKernel::LinearPlusProduct: return ((n - 1.0) * s1 + 0.5 * (s1 * s1 - s2)) / pairs;
    case UKernel::HalfSquaredDifference: return 0.5 * (n * s2 - s1 * s1) / pairs;
  }
  throw std::invalid_argument("ustatistic: unknown kernel");
}

double sample_ustatistic(std::int64_t n, UKernel kernel, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_ustatistic: n must be >= 2");
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (double& x : xs) x = rng.normal();
  return ustatistic(xs, kernel);
}

double ustat_variance(std::int64_t n, double sigma1sq, double sigma2sq) {
  if (n < 2) throw std::invalid_argument("ustat_variance: n must be >= 2");
  const double nd = static_cast<double>(n);
  return 4.0 * sigma1sq / nd * (nd - 2.0) / (nd - 1.0) + 2.0 * sigma2sq / (nd * (nd - 1.0));
}

// -------------------------------------------------------- independent sums

std::string_view to_string(SummandDist dist) {
  switch (dist) {
    case SummandDist::Rademacher: return "rademacher";
    case SummandDist::CenteredExponential: return "exponential";
    case SummandDist::Uniform: return "uniform";
  }
  return "?";
}

SummandDist parse_summand_dist(std::string_view name) {
  for (SummandDist d : {SummandDist::Rademacher, SummandDist::CenteredExponential, SummandDist::Uniform})
    if (to_string(d) == name) return d;
  throw std::invalid_argument("unknown summand distribution '" + std::string(name) + "'");
}

double bernstein_constant(SummandDist dist, std::span<const double> sigmas) {
  if (sigmas.empty()) throw std::invalid_argument("bernstein_constant: empty sigma list");
  const double max_sigma = *std::max_element(sigmas.begin(), sigmas.end());
  // |E xi^j| is 1 (Rademacher, even j), the subfactorial !j <= j! (centered
  // Exp(1)), and 3^{j/2}/(j+1) (uniform on [-sqrt 3, sqrt 3], even j).
  return dist == SummandDist::Uniform ? std::sqrt(3.0) * max_sigma : max_sigma;
}

double sample_independent_sum(std::span<const double> sigmas, SummandDist dist, Rng& rng) {
  if (sigmas.empty()) throw std::invalid_argument("sample_independent_sum: empty sigma list");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double s : sigmas) {
    double xi = 0.0;
    switch (dist) {
      case SummandDist::Rademacher: xi = (rng.next_u64() >> 63) ? 1.0 : -1.0; break;
      case SummandDist::CenteredExponential: xi = rng.exponential() - 1.0; break;
      case SummandDist::Uniform: xi = std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0); break;
    }
    sum += s * xi;
    sum_sq += s * s;
  }
  return sum / std::sqrt(sum_sq);
}

// ------------------------------------------------------------------ batches

std::string_view to_string(SimKind kind) {
  switch (kind) {
    case SimKind::GnpSubgraph: return "GnpSubgraph";
    case SimKind::GnmSubgraph: return "GnmSubgraph";
    case SimKind::Crossings: return "Crossings";
    case SimKind::WishartLogDet: return "WishartLogDet";
    case SimKind::UStatistic: return "UStatistic";
    case SimKind::IndependentSum: return "IndependentSum";
  }
  return "?";
}

SimKind parse_sim_kind(std::string_view name) {
  for (SimKind k : {SimKind::GnpSubgraph, SimKind::GnmSubgraph, SimKind::Crossings, SimKind::WishartLogDet,
                    SimKind::UStatistic, SimKind::IndependentSum})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown simulation kind '" + std::string(name) + "'");
}

void SimSpec::validate() const {
  if (replicates < 1) throw std::invalid_argument("SimSpec: replicates must be >= 1");
  if (n < 1) throw std::invalid_argument("SimSpec: n must be >= 1");
  switch (kind) {
    case SimKind::GnpSubgraph:
      if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("SimSpec: p must lie in (0,1)");
      break;
    case SimKind::GnmSubgraph:
      if (m < 0 || m > n * (n - 1) / 2) throw std::invalid_argument("SimSpec: m out of range");
      break;
    case SimKind::WishartLogDet:
      if (dim < 1 || dim > n) throw std::invalid_argument("SimSpec: Wishart needs 1 <= p <= n");
      break;
    case SimKind::UStatistic:
      if (n < 2) throw std::invalid_argument("SimSpec: U-statistic needs n >= 2");
      break;
    case SimKind::IndependentSum:
      for (double s : sigmas)
        if (!(s > 0.0)) throw std::invalid_argument("SimSpec: sigmas must be > 0");
      break;
    case SimKind::Crossings:
      break;
  }
}

std::vector<double> SimSpec::effective_sigmas() const {
  if (!sigmas.empty()) return sigmas;
  return std::vector<double>(static_cast<std::size_t>(n), 1.0);
}

double draw_one(const SimSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case SimKind::GnpSubgraph:
      return static_cast<double>(sample_gnp_subgraph_count(static_cast<int>(spec.n), spec.p, spec.pattern, rng));
    case SimKind::GnmSubgraph:
      return static_cast<double>(sample_gnm_subgraph_count(static_cast<int>(spec.n), spec.m, spec.pattern, rng));
    case SimKind::Crossings:
      return static_cast<double>(sample_pair_partition_crossings(static_cast<int>(spec.n), rng));
    case SimKind::WishartLogDet: return sample_wishart_logdet(spec.n, spec.dim, rng);
    case SimKind::UStatistic: return sample_ustatistic(spec.n, spec.kernel, rng);
    case SimKind::IndependentSum: {
      const auto sigmas = spec.effective_sigmas();
      return sample_independent_sum(sigmas, spec.dist, rng);
    }
  }
  throw std::logic_error("draw_one: unhandled kind");
}

std::uint64_t fnv1a_digest(std::span<const double> values) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (bits >> (8 * byte)) & 0xffU;
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

SampleBatch run_batch(const SimSpec& spec, int threads) {
  spec.validate();
  SampleBatch batch;
  batch.spec = spec;
  batch.values.resize(static_cast<std::size_t>(spec.replicates));
  parallel_for(spec.replicates, threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t r = begin; r < end; ++r) {
      Rng rng(spec.seed, spec.stream, static_cast<std::uint64_t>(r));
      batch.values[static_cast<std::size_t>(r)] = draw_one(spec, rng);
    }
  });
  batch.digest = fnv1a_digest(batch.values);
  return batch;
}

}  // namespace cumbound
