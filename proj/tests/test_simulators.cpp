#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "cumbound/exact_models.hpp"
#include "cumbound/simulators.hpp"
#include "cumbound/specfun.hpp"

using namespace cumbound;

namespace {

struct Moments {
  double mean = 0, var = 0, se_mean = 0, se_var = 0;
};

Moments moments_of(const std::vector<double>& xs) {
  const double n = double(xs.size());
  double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double m2 = 0, m4 = 0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  return {mean, m2 * n / (n - 1), std::sqrt(m2 / n), std::sqrt(std::max(m4 - m2 * m2, 0.0) / n)};
}

std::vector<double> draws(SimSpec spec) {
  return run_batch(spec).values;
}

double chi_square_critical(int categories) {
  boost::math::chi_squared dist(categories - 1);
  return boost::math::quantile(boost::math::complement(dist, 1e-4));
}

// Injective edge-preserving maps over every l-subset and every ordering of it.
std::int64_t brute_force_count(const Graph& g, const PatternGraph& h) {
  const int n = g.vertex_count();
  const int l = h.vertex_count();
  if (l > n) return 0;
  std::int64_t injections = 0;
  std::vector<int> pick(n, 0);
  std::fill(pick.end() - l, pick.end(), 1);
  do {
    std::vector<int> subset;
    for (int v = 0; v < n; ++v)
      if (pick[v]) subset.push_back(v);
    do {
      bool ok = true;
      for (auto [a, b] : h.edges())
        if (!g.has_edge(subset[a], subset[b])) ok = false;
      if (ok) ++injections;
    } while (std::next_permutation(subset.begin(), subset.end()));
  } while (std::next_permutation(pick.begin(), pick.end()));
  return injections / h.automorphisms();
}

// Crossings straight from the definition: i < j < k < l with {i,k}, {j,l} blocks.
std::int64_t crossings_by_quadruples(const std::vector<int>& partner) {
  const int m = int(partner.size());
  std::int64_t total = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = j + 1; k < m; ++k)
        for (int l = k + 1; l < m; ++l)
          if (partner[i] == k && partner[j] == l) ++total;
  return total;
}

}  // namespace

TEST_CASE("pattern graphs") {
  CHECK(PatternGraph::edge().automorphisms() == 2);
  CHECK(PatternGraph::path2().automorphisms() == 2);
  CHECK(PatternGraph::triangle().automorphisms() == 6);
  CHECK(PatternGraph::cycle(4).automorphisms() == 8);
  CHECK(PatternGraph::cycle(5).automorphisms() == 10);
  CHECK(PatternGraph::complete(4).automorphisms() == 24);
  CHECK(PatternGraph::complete(5).automorphisms() == 120);
  CHECK(PatternGraph::star(3).automorphisms() == 6);
  CHECK(PatternGraph::parse("2-1,0-2,1-0") == PatternGraph::triangle());
  CHECK(PatternGraph::parse("triangle").name() == "triangle");
  CHECK(PatternGraph::parse("0-1,1-2,2-3").edge_count() == 3);
  CHECK_THROWS(PatternGraph::parse("0-1,2-3"));
  CHECK_THROWS(PatternGraph::parse("0-1,1-2,2-3,3-4,4-5"));
  CHECK_THROWS(PatternGraph::parse("0-0"));
  CHECK_THROWS(PatternGraph::parse("0-1,1-0"));
  CHECK_THROWS(PatternGraph::parse("hexagon"));
}

TEST_CASE("subgraph counts match brute force on small random graphs") {
  const std::vector<PatternGraph> patterns{
      PatternGraph::edge(),     PatternGraph::path2(),    PatternGraph::triangle(),
      PatternGraph::cycle(4),   PatternGraph::star(3),    PatternGraph::complete(4),
      PatternGraph::cycle(5),   PatternGraph::parse("0-1,1-2,2-3"), PatternGraph::parse("0-1,1-2,0-2,2-3"),
      PatternGraph::parse("0-1,0-2")};
  for (int trial = 0; trial < 40; ++trial) {
    Rng rng(77, 0, trial);
    const int n = 4 + trial % 4;
    const Graph g = sample_gnp_graph(n, 0.3 + 0.1 * (trial % 5), rng);
    for (const auto& h : patterns) CHECK(count_subgraphs(g, h) == brute_force_count(g, h));
  }
}

TEST_CASE("complete graph counts") {
  Graph k6(6);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) k6.add_edge(i, j);
  CHECK(count_subgraphs(k6, PatternGraph::triangle()) == 20);
  CHECK(count_subgraphs(k6, PatternGraph::cycle(4)) == 45);
  CHECK(count_subgraphs(k6, PatternGraph::complete(5)) == 6);
  CHECK(count_subgraphs(k6, PatternGraph::path2()) == 60);
  Graph big(130);
  big.add_edge(0, 129);
  big.add_edge(129, 64);
  big.add_edge(0, 64);
  CHECK(count_subgraphs(big, PatternGraph::triangle()) == 1);
  CHECK(count_subgraphs(big, PatternGraph::parse("0-1,1-2,2-0")) == 1);
}

TEST_CASE("G(n,p) subgraph counts") {
  SimSpec spec;
  spec.kind = SimKind::GnpSubgraph;
  spec.n = 3;
  spec.p = 0.4;
  spec.pattern = PatternGraph::triangle();
  spec.replicates = 200000;
  auto m = moments_of(draws(spec));
  CHECK(std::fabs(m.mean - 0.064) < 4 * m.se_mean);

  spec.n = 4;
  spec.pattern = PatternGraph::edge();
  m = moments_of(draws(spec));
  CHECK(std::fabs(m.mean - 2.4) < 4 * m.se_mean);
  CHECK(std::fabs(m.var - 6 * 0.4 * 0.6) < 4 * m.se_var);

  spec.n = 20;
  spec.p = 0.5;
  spec.pattern = PatternGraph::triangle();
  spec.replicates = 100000;
  m = moments_of(draws(spec));
  CHECK(std::fabs(m.mean - 142.5) < 4 * m.se_mean);
}

TEST_CASE("exact triangle moments") {
  const auto three = gnp_triangle_moments_exact(3, 0.3);
  CHECK(three.mean == doctest::Approx(0.027));
  CHECK(three.variance == doctest::Approx(0.027 - 0.027 * 0.027));
  const auto full = gnp_triangle_moments_exact(4, 1.0);
  CHECK(full.mean == 4.0);
  CHECK(full.variance == 0.0);

  SimSpec spec;
  spec.kind = SimKind::GnpSubgraph;
  spec.n = 10;
  spec.p = 0.5;
  spec.pattern = PatternGraph::triangle();
  spec.replicates = 1000000;
  spec.seed = 3;
  const auto m = moments_of(draws(spec));
  const auto exact = gnp_triangle_moments_exact(10, 0.5);
  CHECK(std::fabs(m.mean - exact.mean) < 4 * m.se_mean);
  CHECK(std::fabs(m.var - exact.variance) < 4 * m.se_var);
  CHECK_THROWS(gnp_triangle_moments_exact(2, 0.5));
}

TEST_CASE("G(n,m) subgraph counts") {
  Rng rng(1, 2);
  for (int i = 0; i < 50; ++i) {
    CHECK(sample_gnm_subgraph_count(12, 17, PatternGraph::edge(), rng) == 17);
    CHECK(sample_gnm_subgraph_count(3, 3, PatternGraph::triangle(), rng) == 1);
  }
  CHECK_THROWS(sample_gnm_graph(5, 11, rng));

  SimSpec gnm;
  gnm.kind = SimKind::GnmSubgraph;
  gnm.n = 20;
  gnm.m = 95;
  gnm.pattern = PatternGraph::path2();
  gnm.replicates = 100000;
  SimSpec gnp = gnm;
  gnp.kind = SimKind::GnpSubgraph;
  gnp.p = 0.5;
  const auto a = moments_of(draws(gnm));
  const auto b = moments_of(draws(gnp));
  CHECK(a.var + 4 * std::hypot(a.se_var, b.se_var) < b.var);
}

TEST_CASE("G(4,m) edge sets are uniform") {
  Rng rng(99, 4);
  std::map<std::uint64_t, int> counts;
  const int total = 1000000;
  for (int i = 0; i < total; ++i) {
    const Graph g = sample_gnm_graph(4, 3, rng);
    std::uint64_t key = 0;
    int bit = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b, ++bit)
        if (g.has_edge(a, b)) key |= 1ULL << bit;
    ++counts[key];
  }
  CHECK(counts.size() == 20);
  double chi2 = 0;
  for (auto [key, c] : counts) chi2 += (c - total / 20.0) * (c - total / 20.0) / (total / 20.0);
  CHECK(chi2 < chi_square_critical(20));
}

TEST_CASE("pair partitions are uniform") {
  for (int n = 2; n <= 4; ++n) {
    Rng rng(5, n);
    std::map<std::vector<int>, int> counts;
    const int total = 1000000;
    for (int i = 0; i < total; ++i) ++counts[sample_pair_partition(n, rng)];
    const int categories = n == 2 ? 3 : n == 3 ? 15 : 105;
    CHECK(int(counts.size()) == categories);
    const double expected = double(total) / categories;
    double chi2 = 0;
    for (auto& [key, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < chi_square_critical(categories));
  }
}

TEST_CASE("crossing counts") {
  Rng rng(8, 8);
  CHECK(sample_pair_partition_crossings(1, rng) == 0);
  for (int i = 0; i < 200; ++i) {
    const auto partner = sample_pair_partition(2 + i % 9, rng);
    CHECK(count_crossings(partner) == crossings_by_quadruples(partner));
  }
  CHECK(enumerate_pair_partitions_crossings(1) == std::map<std::int64_t, std::uint64_t>{{0, 1}});
  CHECK(enumerate_pair_partitions_crossings(2) == std::map<std::int64_t, std::uint64_t>{{0, 2}, {1, 1}});
  CHECK_THROWS(enumerate_pair_partitions_crossings(9));
  std::uint64_t double_factorial = 1;
  for (int n = 1; n <= 8; ++n) {
    double_factorial *= 2 * n - 1;
    const auto dist = enumerate_pair_partitions_crossings(n);
    double mass = 0, s1 = 0, s2 = 0;
    for (auto [v, c] : dist) {
      mass += double(c);
      s1 += double(c) * double(v);
      s2 += double(c) * double(v) * double(v);
    }
    CHECK(mass == double(double_factorial));
    const auto exact = crossings_moments_exact(n);
    CHECK(s1 / mass == doctest::Approx(exact.mean).epsilon(1e-12));
    CHECK(s2 / mass - (s1 / mass) * (s1 / mass) == doctest::Approx(exact.variance).epsilon(1e-10));
    // noncrossing pairings are counted by the Catalan numbers
    std::uint64_t catalan = 1;
    for (int i = 0; i < n; ++i) catalan = catalan * 2 * (2 * i + 1) / (i + 2);
    CHECK(dist.at(0) == catalan);
  }
}

TEST_CASE("Monte Carlo crossings at n = 20") {
  SimSpec spec;
  spec.kind = SimKind::Crossings;
  spec.n = 20;
  spec.replicates = 100000;
  const auto m = moments_of(draws(spec));
  const auto exact = crossings_moments_exact(20);
  CHECK(std::fabs(m.mean - exact.mean) < 4 * m.se_mean);
  CHECK(std::fabs(m.var - exact.variance) < 4 * m.se_var);
}

TEST_CASE("Wishart log-determinant") {
  SimSpec spec;
  spec.kind = SimKind::WishartLogDet;
  spec.n = 1;
  spec.dim = 1;
  spec.replicates = 1000000;
  auto m = moments_of(draws(spec));
  CHECK(std::fabs(m.mean - (-kEulerGamma - std::log(2.0))) < 4 * m.se_mean);

  spec.n = 50;
  spec.dim = 50;
  spec.replicates = 100000;
  m = moments_of(draws(spec));
  const ModelSpec model{ModelKind::LaguerreLogDet, 50, 50, 1, 1.0};
  CHECK(std::fabs(m.mean - model_cumulant(model, 1)) < 4 * m.se_mean);
  CHECK(std::fabs(m.var - model_cumulant(model, 2)) < 4 * m.se_var);

  Rng rng(1, 1);
  CHECK_THROWS(sample_wishart_logdet(5, 0, rng));
  CHECK_THROWS(sample_wishart_logdet(5, 6, rng));
}

TEST_CASE("U-statistics") {
  Rng rng(4, 4);
  std::vector<double> xs(9);
  for (double& x : xs) x = rng.normal();
  for (UKernel kernel : {UKernel::LinearPlusProduct, UKernel::HalfSquaredDifference}) {
    double direct = 0;
    int pairs = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = i + 1; j < xs.size(); ++j, ++pairs) {
        const double x = xs[i], y = xs[j];
        direct += kernel == UKernel::LinearPlusProduct ? x + y + x * y : 0.5 * (x - y) * (x - y);
      }
    CHECK(ustatistic(xs, kernel) == doctest::Approx(direct / pairs).epsilon(1e-13));
  }
  const std::vector<double> two{0.5, -2.0};
  CHECK(ustatistic(two, UKernel::LinearPlusProduct) == doctest::Approx(0.5 - 2.0 - 1.0));

  CHECK(ustat_variance(2, 1.0, 3.0) == doctest::Approx(3.0));
  CHECK(ustat_variance(3, 1.0, 3.0) == doctest::Approx(5.0 / 3.0));
  CHECK(ustat_variance(1000000, 1.0, 3.0) * 1e6 / 4 == doctest::Approx(1.0).epsilon(1e-5));

  for (UKernel kernel : {UKernel::LinearPlusProduct, UKernel::HalfSquaredDifference}) {
    SimSpec spec;
    spec.kind = SimKind::UStatistic;
    spec.n = 20;
    spec.kernel = kernel;
    spec.replicates = 100000;
    const auto m = moments_of(draws(spec));
    const auto km = kernel_moments(kernel);
    CHECK(std::fabs(m.mean - km.mean) < 4 * m.se_mean);
    CHECK(std::fabs(m.var - ustat_variance(20, km.sigma1sq, km.sigma2sq)) < 4 * m.se_var);
  }
  CHECK_THROWS(parse_kernel("x*y"));
}

TEST_CASE("independent sums") {
  Rng rng(6, 6);
  const std::vector<double> ones(4, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double z = sample_independent_sum(ones, SummandDist::Rademacher, rng) * 2.0;
    CHECK(std::fabs(z - std::round(z)) < 1e-12);
    CHECK(int(std::lround(z)) % 2 == 0);
  }
  const std::vector<double> single{3.0};
  for (int i = 0; i < 100; ++i) {
    const double z = sample_independent_sum(single, SummandDist::Uniform, rng);
    CHECK(std::fabs(z) <= std::sqrt(3.0));
  }

  SimSpec spec;
  spec.kind = SimKind::IndependentSum;
  spec.n = 100;
  spec.dist = SummandDist::CenteredExponential;
  spec.replicates = 200000;
  const auto values = draws(spec);
  double m3 = 0, m6 = 0;
  for (double z : values) {
    m3 += z * z * z;
    m6 += std::pow(z, 6);
  }
  m3 /= double(values.size());
  m6 /= double(values.size());
  const double se = std::sqrt((m6 - m3 * m3) / double(values.size()));
  CHECK(std::fabs(m3 - 0.2) < 4 * se);
}

TEST_CASE("Bernstein constants satisfy the moment condition") {
  const std::vector<double> sigma{1.0};
  double factorial = 2;
  double subfactorial = 1;  // !2
  for (int j = 3; j <= 14; ++j) {
    factorial *= j;
    subfactorial = j * subfactorial + ((j % 2 == 0) ? 1 : -1);
    const double rademacher = (j % 2 == 0) ? 1.0 : 0.0;
    const double uniform = (j % 2 == 0) ? std::pow(3.0, 0.5 * j) / (j + 1) : 0.0;
    auto rhs = [&](SummandDist d) { return factorial * std::pow(bernstein_constant(d, sigma), j - 2); };
    CHECK(rademacher <= rhs(SummandDist::Rademacher));
    CHECK(std::fabs(subfactorial) <= rhs(SummandDist::CenteredExponential));
    CHECK(uniform <= rhs(SummandDist::Uniform) * (1 + 1e-12));
  }
}

TEST_CASE("batches are reproducible across runs and thread counts") {
  SimSpec spec;
  spec.kind = SimKind::GnpSubgraph;
  spec.n = 15;
  spec.p = 0.3;
  spec.pattern = PatternGraph::cycle(4);
  spec.replicates = 3001;
  spec.seed = 11;
  spec.stream = 2;
  const auto a = run_batch(spec, 1);
  const auto b = run_batch(spec, 1);
  const auto c = run_batch(spec, 7);
  CHECK(a.values.size() == 3001);
  CHECK(a.values == b.values);
  CHECK(a.values == c.values);
  CHECK(a.digest == c.digest);
  spec.seed = 12;
  CHECK(run_batch(spec, 1).digest != a.digest);
}

TEST_CASE("spec validation") {
  SimSpec spec;
  spec.kind = SimKind::GnpSubgraph;
  spec.n = 10;
  spec.p = 0.0;
  CHECK_THROWS(spec.validate());
  spec.kind = SimKind::GnmSubgraph;
  spec.m = 46;
  CHECK_THROWS(spec.validate());
  spec.m = 45;
  CHECK_NOTHROW(spec.validate());
  spec.replicates = 0;
  CHECK_THROWS(spec.validate());
  CHECK(parse_sim_kind("Crossings") == SimKind::Crossings);
  CHECK_THROWS(parse_sim_kind("Ising"));
  CHECK(parse_summand_dist("uniform") == SummandDist::Uniform);
}
