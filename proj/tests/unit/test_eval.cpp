#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "fishergen/clustering.hpp"
#include "fishergen/errors.hpp"
#include "fishergen/eval.hpp"
#include "fishergen/frechet.hpp"
#include "fishergen/kde.hpp"
#include "fishergen/linalg.hpp"
#include "oracles.hpp"

using namespace fishergen;

namespace {

oracle::Matrix random_orthogonal(std::mt19937_64& gen, std::size_t n) {
  // Gram-Schmidt on a Gaussian matrix.
  auto a = oracle::to_matrix(oracle::random_array(gen, n, n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double d = 0;
      for (std::size_t k = 0; k < n; ++k) d += a[i][k] * a[j][k];
      for (std::size_t k = 0; k < n; ++k) a[i][k] -= d * a[j][k];
    }
    double nn = 0;
    for (double x : a[i]) nn += x * x;
    for (double& x : a[i]) x /= std::sqrt(nn);
  }
  return a;
}

oracle::Matrix with_spectrum(const oracle::Matrix& q, const std::vector<double>& lambda) {
  const std::size_t n = lambda.size();
  oracle::Matrix c(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) c[i][j] += q[k][i] * lambda[k] * q[k][j];
  return c;
}

LatentRecord record_with_metric(std::vector<double> mu, const oracle::Matrix& m) {
  const auto e = eig_sym(oracle::from_matrix(m));
  LatentRecord r;
  r.mu = std::move(mu);
  r.eigvals = e.values;
  r.eigvecs = e.vectors;
  return r;
}

DenseArray blobs(std::mt19937_64& gen, const std::vector<std::vector<double>>& centers,
                 std::size_t per, double spread, std::vector<int>& labels) {
  const std::size_t d = centers[0].size();
  DenseArray out({centers.size() * per, d});
  std::normal_distribution<double> nd(0.0, spread);
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (std::size_t i = 0; i < per; ++i) {
      for (std::size_t j = 0; j < d; ++j) out(c * per + i, j) = centers[c][j] + nd(gen);
      labels.push_back(static_cast<int>(c));
    }
  }
  return out;
}

double brute_force_trace(const DenseArray& w) {
  const std::size_t n = w.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1e300;
  do {
    double t = 0;
    for (std::size_t i = 0; i < n; ++i) t += w(i, perm[i]);
    best = std::max(best, t);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_SUITE("mse") {
  TEST_CASE("identical arrays give zero") {
    const auto a = DenseArray::matrix(2, 2, {0.1, 0.2, 0.3, 0.4});
    CHECK(mse(a, a).mean == 0.0);
  }

  TEST_CASE("unit error per pixel") {
    const auto r = mse(DenseArray::matrix(1, 2, {0, 0}), DenseArray::matrix(1, 2, {1, 1}));
    CHECK(r.per_datum == std::vector<double>{1.0});
  }

  TEST_CASE("random pair against a two-loop evaluation") {
    std::mt19937_64 gen(1);
    const auto a = oracle::random_array(gen, 13, 7), b = oracle::random_array(gen, 13, 7);
    const auto r = mse(a, b);
    double total = 0;
    for (std::size_t i = 0; i < 13; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < 7; ++j) s += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
      CHECK(std::abs(r.per_datum[i] - s / 7) <= 1e-12);
      total += s / 7;
    }
    CHECK(std::abs(r.mean - total / 13) <= 1e-12);
  }

  TEST_CASE("shape mismatch") {
    CHECK_THROWS_AS(mse(DenseArray({2, 3}), DenseArray({3, 2})), ShapeError);
  }
}

TEST_SUITE("eig_sym") {
  TEST_CASE("diagonal input") {
    const auto e = eig_sym(DenseArray::matrix(2, 2, {1, 0, 0, 3}));
    CHECK(e.values == std::vector<double>{3, 1});
    CHECK(std::abs(e.vectors(0, 1)) == 1.0);
    CHECK(std::abs(e.vectors(1, 0)) == 1.0);
  }

  TEST_CASE("2x2 closed form") {
    const auto e = eig_sym(DenseArray::matrix(2, 2, {2, 1, 1, 2}));
    CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-14));
    const double s = 1 / std::sqrt(2.0);
    CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(s));
    CHECK(e.vectors(0, 0) * e.vectors(0, 1) > 0);
    CHECK(e.vectors(1, 0) * e.vectors(1, 1) < 0);
  }

  TEST_CASE("random SPD reconstructs and satisfies A v = lambda v") {
    std::mt19937_64 gen(2);
    for (std::size_t n : {3u, 8u, 20u, 64u}) {
      const auto b = oracle::to_matrix(oracle::random_array(gen, n, n));
      auto a = oracle::mat_mul(oracle::mat_t(b), b);
      for (std::size_t i = 0; i < n; ++i) a[i][i] += 0.5;
      const auto e = eig_sym(oracle::from_matrix(a));
      double err = 0, norm = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          double r = 0;
          for (std::size_t k = 0; k < n; ++k) r += e.vectors(k, i) * e.values[k] * e.vectors(k, j);
          err += (r - a[i][j]) * (r - a[i][j]);
          norm += a[i][j] * a[i][j];
        }
      }
      CHECK(std::sqrt(err) <= 1e-8 * std::max(1.0, std::sqrt(norm)));
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          double av = 0;
          for (std::size_t j = 0; j < n; ++j) av += a[i][j] * e.vectors(k, j);
          CHECK(std::abs(av - e.values[k] * e.vectors(k, i)) <= 1e-8 * std::max(1.0, e.values[0]));
        }
      }
      CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
    }
  }

  TEST_CASE("eigenvectors are orthonormal") {
    std::mt19937_64 gen(3);
    const auto q = random_orthogonal(gen, 6);
    const auto e = eig_sym(oracle::from_matrix(with_spectrum(q, {6, 5, 4, 3, 2, 1})));
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        CHECK(std::abs(dot(e.vectors.row(i), e.vectors.row(j)) - (i == j ? 1.0 : 0.0)) <= 1e-8);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(eig_sym(DenseArray::matrix(2, 2, {1, 0.5, 0.4, 1})), ShapeError);
    CHECK_THROWS_AS(eig_sym(DenseArray({2, 3})), ShapeError);
    CHECK_THROWS_AS(eig_sym(DenseArray::identity(65)), ShapeError);
  }

  TEST_CASE("top eigenpairs of a large matrix") {
    std::mt19937_64 gen(4);
    const std::size_t n = 100;
    const auto q = random_orthogonal(gen, n);
    std::vector<double> lam(n);
    for (std::size_t i = 0; i < n; ++i) lam[i] = 10.0 / (1.0 + double(i));
    const auto e = top_eigenpairs(oracle::from_matrix(with_spectrum(q, lam)), 5);
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(e.values[k] == doctest::Approx(lam[k]).epsilon(1e-8));
      CHECK(std::abs(std::abs(dot(e.vectors.row(k), q[k])) - 1.0) <= 1e-6);
    }
  }

  TEST_CASE("sqrt_psd squares back") {
    std::mt19937_64 gen(5);
    const auto q = random_orthogonal(gen, 4);
    const auto a = oracle::from_matrix(with_spectrum(q, {4, 2, 1, 0.25}));
    const auto s = sqrt_psd(a);
    const auto ss = matmul(s, s);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(ss[i] == doctest::Approx(a[i]).epsilon(1e-10));
  }
}

TEST_SUITE("ellipses") {
  TEST_CASE("identity metric gives the unit circle") {
    const auto r = record_with_metric({0.5, -1}, {{1, 0}, {0, 1}});
    const auto poly = uncertainty_ellipse(r, 1.0);
    CHECK(poly.size() == 64);
    for (const auto& p : poly) {
      CHECK(std::hypot(p[0] - 0.5, p[1] + 1) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("diag(4,1) with n_sigma 2 gives semi-axes 1 and 2") {
    const auto r = record_with_metric({0, 0}, {{4, 0}, {0, 1}});
    const auto poly = uncertainty_ellipse(r, 2.0);
    double max_x = 0, max_y = 0;
    for (const auto& p : poly) {
      max_x = std::max(max_x, std::abs(p[0]));
      max_y = std::max(max_y, std::abs(p[1]));
    }
    CHECK(max_x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_y == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("polygon area matches pi n^2 / sqrt(det M)") {
    std::mt19937_64 gen(6);
    for (int t = 0; t < 10; ++t) {
      const auto q = random_orthogonal(gen, 2);
      const double l1 = 1 + 5 * std::abs(oracle::random_vector(gen, 1)[0]);
      const double l2 = 1 + 2 * std::abs(oracle::random_vector(gen, 1)[0]);
      const auto m = with_spectrum(q, {l1, l2});
      const auto r = record_with_metric({0.3, 0.7}, m);
      for (double n : {1.0, 2.0}) {
        const double area = polygon_area(uncertainty_ellipse(r, n));
        CHECK(area == doctest::Approx(std::numbers::pi * n * n / std::sqrt(l1 * l2)).epsilon(0.01));
      }
    }
  }

  TEST_CASE("shoelace area of a unit square") {
    CHECK(polygon_area({{0, 0}, {1, 0}, {1, 1}, {0, 1}}) == doctest::Approx(1.0));
  }

  TEST_CASE("wrong dimension or missing eigenpairs") {
    const auto r3 = record_with_metric({0, 0, 0}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    CHECK_THROWS_AS(uncertainty_ellipse(r3, 1.0), ShapeError);
    LatentRecord bare;
    bare.mu = {0, 0};
    CHECK_THROWS_AS(uncertainty_ellipse(bare, 1.0), ShapeError);
  }
}

TEST_SUITE("latent records") {
  TEST_CASE("FisherNet records carry metric eigenpairs at or above one") {
    auto model = build_architecture(3, 6, Variant::FisherNet, {8, 2});
    CounterRng rng(7);
    initialize_weights(model, rng);
    std::mt19937_64 gen(7);
    const auto data = oracle::random_array(gen, 10, 6);
    std::vector<int> labels(10, 1);
    const auto recs = latent_records(model, data, labels, true);
    REQUIRE(recs.size() == 10);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(recs[i].index == i);
      for (double ev : *recs[i].eigvals) CHECK(ev >= 1.0 - 1e-6);
      const auto mu = encode(model, DenseArray::vector(data.row(i))).mu;
      for (std::size_t j = 0; j < 3; ++j) CHECK(recs[i].mu[j] == mu[j]);
      const auto& v = *recs[i].eigvecs;
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b)
          CHECK(std::abs(dot(v.row(a), v.row(b)) - (a == b ? 1.0 : 0.0)) <= 1e-8);
    }
  }

  TEST_CASE("metric_matrix is the dense operator") {
    auto model = build_architecture(2, 4, Variant::FisherNet, {5, 1});
    CounterRng rng(8);
    initialize_weights(model, rng);
    MetricOperator op(model, DenseArray::vector({0.2, -0.1}));
    const auto m = metric_matrix(op);
    const auto col = op.apply(std::vector<double>{0, 1});
    CHECK(m(0, 1) == doctest::Approx(col[0]).epsilon(1e-14));
    CHECK(m(1, 1) == doctest::Approx(col[1]).epsilon(1e-14));
  }

  TEST_CASE("baseline records use exp(-logvar) as the precision") {
    auto model = build_architecture(2, 4, Variant::BaselineVAE, {5, 1});
    CounterRng rng(9);
    initialize_weights(model, rng);
    const auto data = DenseArray::matrix(1, 4, {0.1, 0.5, 0.9, 0.3});
    const auto recs = latent_records(model, data, {0}, true);
    const auto enc = encode(model, data);
    std::vector<double> expect{std::exp(-enc.logvar[0]), std::exp(-enc.logvar[1])};
    std::sort(expect.rbegin(), expect.rend());
    CHECK((*recs[0].eigvals)[0] == doctest::Approx(expect[0]));
    CHECK((*recs[0].eigvals)[1] == doctest::Approx(expect[1]));
  }

  TEST_CASE("label mismatch") {
    const auto model = build_architecture(2, 4, Variant::FisherNet, {5, 1});
    CHECK_THROWS_AS(latent_records(model, DenseArray({2, 4}), {0}, false), ShapeError);
  }
}

TEST_SUITE("kmeans") {
  TEST_CASE("two separated blobs are recovered") {
    std::mt19937_64 gen(10);
    std::vector<int> labels;
    const auto pts = blobs(gen, {{-5, 0}, {5, 0}}, 50, 0.3, labels);
    const auto r = kmeans(pts, 2, 1);
    for (std::size_t i = 0; i < pts.rows(); ++i) {
      CHECK(r.assignments[i] == r.assignments[labels[i] == 0 ? 0 : 50]);
    }
    CHECK(r.assignments[0] != r.assignments[50]);
  }

  TEST_CASE("K = p gives zero inertia") {
    std::mt19937_64 gen(11);
    const auto pts = oracle::random_array(gen, 12, 3);
    const auto r = kmeans(pts, 12, 2);
    CHECK(r.inertia == doctest::Approx(0.0));
  }

  TEST_CASE("inertia is non-increasing across iterations") {
    std::mt19937_64 gen(12);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto pts = oracle::random_array(gen, 200, 2);
      const auto r = kmeans(pts, 6, seed);
      for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
        CHECK(r.inertia_history[i] <= r.inertia_history[i - 1] + 1e-12);
      }
    }
  }

  TEST_CASE("restarts never do worse than their first run") {
    std::mt19937_64 gen(13);
    const auto pts = oracle::random_array(gen, 150, 2);
    const auto multi = kmeans_restarts(pts, 5, 3);
    const auto single = kmeans(pts, 5, CounterRng::derive(3, 0).next_u64());
    CHECK(multi.inertia <= single.inertia + 1e-12);
  }

  TEST_CASE("fixed seed is deterministic") {
    std::mt19937_64 gen(14);
    const auto pts = oracle::random_array(gen, 80, 2);
    CHECK(kmeans(pts, 4, 9).assignments == kmeans(pts, 4, 9).assignments);
  }

  TEST_CASE("invalid K") {
    CHECK_THROWS_AS(kmeans(DenseArray({3, 2}), 4, 1), ShapeError);
    CHECK_THROWS_AS(kmeans(DenseArray({3, 2}), 0, 1), ShapeError);
  }
}

TEST_SUITE("cluster trace") {
  TEST_CASE("clusters equal to labels give trace C") {
    const std::vector<std::size_t> a{0, 1, 2, 0, 1, 2};
    const std::vector<int> l{0, 1, 2, 0, 1, 2};
    const auto m = cluster_trace(a, l, 3, 3);
    CHECK(m.trace == doctest::Approx(3.0));
  }

  TEST_CASE("relabelled clusters still give trace C") {
    const std::vector<std::size_t> a{2, 0, 1, 2, 0, 1};
    const std::vector<int> l{0, 1, 2, 0, 1, 2};
    const auto m = cluster_trace(a, l, 3, 3);
    CHECK(m.trace == doctest::Approx(3.0));
    for (std::size_t i = 0; i < 3; ++i) CHECK(m.fractions(i, i) == doctest::Approx(1.0));
  }

  TEST_CASE("independent clusters give about one for C = 2") {
    CounterRng rng(15);
    std::vector<std::size_t> a;
    std::vector<int> l;
    for (int i = 0; i < 20000; ++i) {
      a.push_back(rng.below(2));
      l.push_back(static_cast<int>(rng.below(2)));
    }
    CHECK(cluster_trace(a, l, 2, 2).trace == doctest::Approx(1.0).epsilon(0.03));
  }

  TEST_CASE("rows sum to one and trace lies in [0, C]") {
    CounterRng rng(16);
    std::vector<std::size_t> a;
    std::vector<int> l;
    for (int i = 0; i < 500; ++i) {
      a.push_back(rng.below(5));
      l.push_back(static_cast<int>(rng.below(5)));
    }
    const auto m = cluster_trace(a, l, 5, 5);
    for (std::size_t i = 0; i < 5; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < 5; ++j) s += m.fractions(i, j);
      CHECK(std::abs(s - 1.0) <= 1e-9);
    }
    CHECK(m.trace >= 0.0);
    CHECK(m.trace <= 5.0);
  }

  TEST_CASE("Hungarian matches brute force over all permutations for C <= 8") {
    std::mt19937_64 gen(17);
    for (std::size_t n = 1; n <= 8; ++n) {
      for (int t = 0; t < 5; ++t) {
        DenseArray w({n, n});
        std::uniform_real_distribution<double> u(0, 1);
        for (double& x : w.values()) x = u(gen);
        const auto cols = hungarian_max(w);
        double got = 0;
        for (std::size_t i = 0; i < n; ++i) got += w(i, cols[i]);
        CHECK(got == doctest::Approx(brute_force_trace(w)).epsilon(1e-12));
        auto sorted = cols;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n; ++i) CHECK(sorted[i] == i);
      }
    }
  }

  TEST_CASE("cluster_trace agrees with brute force on random assignments") {
    CounterRng rng(18);
    for (std::size_t c = 2; c <= 6; ++c) {
      std::vector<std::size_t> a;
      std::vector<int> l;
      for (int i = 0; i < 300; ++i) {
        l.push_back(static_cast<int>(rng.below(c)));
        a.push_back(rng.uniform() < 0.6 ? static_cast<std::size_t>((l.back() + 1) % c) : rng.below(c));
      }
      const auto m = cluster_trace(a, l, c, c);
      // Unpermuted fraction matrix.
      DenseArray raw({c, c});
      std::vector<double> counts(c, 0);
      for (std::size_t i = 0; i < a.size(); ++i) {
        raw(l[i], a[i]) += 1;
        counts[l[i]] += 1;
      }
      for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j) raw(i, j) /= counts[i];
      CHECK(m.trace == doctest::Approx(brute_force_trace(raw)).epsilon(1e-12));
    }
  }

  TEST_CASE("more clusters than classes") {
    const std::vector<std::size_t> a{0, 1, 2, 3};
    const std::vector<int> l{0, 0, 1, 1};
    const auto m = cluster_trace(a, l, 2, 4);
    CHECK(m.trace == doctest::Approx(1.0));
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(cluster_trace({0, 1}, {0}, 2, 2), ShapeError);
    CHECK_THROWS_AS(cluster_trace({0, 5}, {0, 1}, 2, 2), ShapeError);
    CHECK_THROWS_AS(hungarian_max(DenseArray({2, 3})), ShapeError);
  }
}

TEST_SUITE("kde") {
  TEST_CASE("single point with forced bandwidth samples N(point, h^2 I)") {
    const auto model = kde_fit(DenseArray::matrix(1, 2, {1, -2}), 0.5);
    CounterRng rng(19);
    const auto s = kde_sample(model, 40000, rng);
    double m0 = 0, v0 = 0;
    for (std::size_t i = 0; i < s.rows(); ++i) m0 += s(i, 0);
    m0 /= s.rows();
    for (std::size_t i = 0; i < s.rows(); ++i) v0 += (s(i, 0) - m0) * (s(i, 0) - m0);
    v0 /= s.rows() - 1;
    CHECK(m0 == doctest::Approx(1.0).epsilon(0.01));
    CHECK(v0 == doctest::Approx(0.25).epsilon(0.03));
  }

  TEST_CASE("single point without bandwidth falls back to 0.1") {
    CHECK(kde_fit(DenseArray::matrix(1, 2, {1, 2})).bandwidth == 0.1);
  }

  TEST_CASE("Scott bandwidth") {
    std::mt19937_64 gen(20);
    const auto pts = oracle::random_array(gen, 300, 2, 2.0);
    double mean_std = 0;
    for (std::size_t j = 0; j < 2; ++j) {
      double m = 0, v = 0;
      for (std::size_t i = 0; i < 300; ++i) m += pts(i, j);
      m /= 300;
      for (std::size_t i = 0; i < 300; ++i) v += (pts(i, j) - m) * (pts(i, j) - m);
      mean_std += std::sqrt(v / 299) / 2;
    }
    CHECK(kde_fit(pts).bandwidth == doctest::Approx(std::pow(300.0, -1.0 / 6.0) * mean_std));
  }

  TEST_CASE("sample mean approaches the support mean") {
    std::mt19937_64 gen(21);
    const auto pts = oracle::random_array(gen, 50, 2);
    const auto model = kde_fit(pts);
    CounterRng rng(22);
    const std::size_t n = 50000;
    const auto s = kde_sample(model, n, rng);
    for (std::size_t j = 0; j < 2; ++j) {
      double sm = 0, pm = 0, pv = 0;
      for (std::size_t i = 0; i < n; ++i) sm += s(i, j);
      for (std::size_t i = 0; i < 50; ++i) pm += pts(i, j);
      pm /= 50;
      for (std::size_t i = 0; i < 50; ++i) pv += (pts(i, j) - pm) * (pts(i, j) - pm);
      const double sd = std::sqrt(pv / 50 + model.bandwidth * model.bandwidth);
      CHECK(std::abs(sm / n - pm) <= 3 * sd / std::sqrt(double(n)));
    }
  }

  TEST_CASE("tiny bandwidth reproduces the support distribution") {
    const auto pts = DenseArray::matrix(3, 1, {-1, 0, 4});
    const auto model = kde_fit(pts, 1e-12);
    CounterRng rng(23);
    const auto s = kde_sample(model, 3000, rng);
    std::vector<int> counts(3, 0);
    for (std::size_t i = 0; i < s.rows(); ++i) {
      const double x = s(i, 0);
      REQUIRE((std::abs(x + 1) < 1e-9 || std::abs(x) < 1e-9 || std::abs(x - 4) < 1e-9));
      ++counts[std::abs(x + 1) < 1e-9 ? 0 : std::abs(x) < 1e-9 ? 1 : 2];
    }
    for (int c : counts) CHECK(c == doctest::Approx(1000).epsilon(0.1));
  }

  TEST_CASE("fixed seed is deterministic") {
    std::mt19937_64 gen(24);
    const auto model = kde_fit(oracle::random_array(gen, 10, 2));
    CounterRng a(5), b(5);
    CHECK(kde_sample(model, 20, a) == kde_sample(model, 20, b));
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(kde_fit(DenseArray({0, 2})), ShapeError);
    CHECK_THROWS_AS(kde_fit(DenseArray({2, 2}), 0.0), ShapeError);
  }
}

TEST_SUITE("frechet") {
  TEST_CASE("identical sets give zero") {
    std::mt19937_64 gen(25);
    const auto a = oracle::random_array(gen, 100, 20);
    CHECK(frechet_proxy(a, a) <= 1e-6);
  }

  TEST_CASE("1-D N(0,1) vs N(1,1) gives one") {
    const auto d = frechet_gaussian(std::vector<double>{0}, DenseArray::matrix(1, 1, {1}),
                                    std::vector<double>{1}, DenseArray::matrix(1, 1, {1}));
    CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("shared eigenbasis reduces to the scalar formula per axis") {
    std::mt19937_64 gen(26);
    for (int t = 0; t < 5; ++t) {
      const std::size_t n = 6;
      const auto q = random_orthogonal(gen, n);
      std::vector<double> a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = 0.1 + std::abs(oracle::random_vector(gen, 1)[0]);
        b[i] = 0.1 + std::abs(oracle::random_vector(gen, 1)[0]);
      }
      const auto m1 = oracle::random_vector(gen, n), m2 = oracle::random_vector(gen, n);
      const double d = frechet_gaussian(m1, oracle::from_matrix(with_spectrum(q, a)), m2,
                                        oracle::from_matrix(with_spectrum(q, b)));
      double ref = 0;
      for (std::size_t i = 0; i < n; ++i) {
        ref += (m1[i] - m2[i]) * (m1[i] - m2[i]);
        ref += (std::sqrt(a[i]) - std::sqrt(b[i])) * (std::sqrt(a[i]) - std::sqrt(b[i]));
      }
      CHECK(std::abs(d - ref) <= 1e-6 * std::max(1.0, ref));
    }
  }

  TEST_CASE("symmetric under exchange with a fixed basis, never negative") {
    std::mt19937_64 gen(27);
    const auto a = oracle::random_array(gen, 60, 10), b = oracle::random_array(gen, 60, 10, 1.5);
    const auto basis = fit_pca(a, 5);
    const auto pa = project(basis, a), pb = project(basis, b);
    CHECK(frechet_features(pa, pb) == doctest::Approx(frechet_features(pb, pa)).epsilon(1e-10));
    CHECK(frechet_features(pa, pb) >= 0.0);
  }

  TEST_CASE("rank-deficient covariance gets a ridge and stays finite") {
    DenseArray a({10, 3}, 0.0);
    for (std::size_t i = 0; i < 10; ++i) a(i, 0) = double(i);
    const double d = frechet_features(a, a);
    CHECK(std::isfinite(d));
    CHECK(d <= 1e-6);
  }

  TEST_CASE("PCA on 784-pixel images") {
    std::mt19937_64 gen(28);
    const auto a = oracle::random_array(gen, 40, 784), b = oracle::random_array(gen, 40, 784);
    const double d = frechet_proxy(a, b);
    CHECK(std::isfinite(d));
    CHECK(d >= 0.0);
  }

  TEST_CASE("too few rows") {
    std::mt19937_64 gen(29);
    const auto a = oracle::random_array(gen, 16, 20), b = oracle::random_array(gen, 30, 20);
    CHECK_THROWS_AS(frechet_proxy(a, b), ShapeError);
    CHECK_THROWS_AS(frechet_proxy(b, a), ShapeError);
    CHECK_NOTHROW(frechet_proxy(b, oracle::random_array(gen, 17, 20)));
  }
}
