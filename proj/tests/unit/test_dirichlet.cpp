#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "dirichar/dirichlet.hpp"
#include "dirichar/error.hpp"
#include "oracles.hpp"

using namespace dirichar;

TEST_CASE("log_gamma at exact points") {
  CHECK(std::abs(log_gamma(1.0)) < 1e-15);
  CHECK(std::abs(log_gamma(0.5) - 0.5 * std::log(M_PI)) < 1e-14);
  CHECK(std::abs(log_gamma(10.0) - std::log(362880.0)) < 1e-13);
  CHECK(std::abs(log_gamma(2.0)) < 1e-15);
}

TEST_CASE("log_gamma agrees with std::lgamma over a wide range") {
  for (double x = 1e-3; x < 200.0; x *= 1.07) {
    CHECK(std::abs(log_gamma(x) - std::lgamma(x)) < 1e-13 * std::max(1.0, std::abs(std::lgamma(x))));
  }
}

TEST_CASE("log_gamma against 40-digit references") {
  // absolute error below 1e-12 wherever binary64 resolves it; beyond that
  // (ln Gamma above ~1000) four units in the last place
  const std::pair<double, double> refs[] = {
      {1e-6, 13.81550998074943166920783},    {1e-4, 9.210282658633962258448658},
      {0.01, 4.599479878042021722513945},    {0.3, 1.095797994818075521677168},
      {0.5, 0.5723649429247000870717137},    {1.5, -0.1207822376352452223455184},
      {2.5, 0.2846828704729191596324947},    {3.7, 1.428072326665387921872381},
      {7.25, 7.052185450738539444925749},    {17.3, 31.51562417817528985943664},
      {42.0, 114.0342117814617032329203},    {123.4, 469.3360974421905584447938},
      {1000, 5905.220423209181211826077},    {54321.5, 537923.6480392066711084601},
      {1e6, 12815504.56914761165997697}};
  for (const auto& [x, ref] : refs) {
    CAPTURE(x);
    const double ulp = std::nextafter(std::abs(ref), INFINITY) - std::abs(ref);
    CHECK(std::abs(log_gamma(x) - ref) <= std::max(1e-12, 4 * ulp));
  }
}

TEST_CASE("log_gamma rejects non-positive arguments") {
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
}

TEST_CASE("log_density reference values") {
  CHECK(std::abs(log_density(DirichletParams({1, 1, 1}), SimplexPoint({0.2, 0.3, 0.5})) - std::log(2.0)) < 1e-14);
  CHECK(std::abs(log_density(DirichletParams({1, 1, 1}), SimplexPoint({0.7, 0.1, 0.2})) - std::log(2.0)) < 1e-14);
  CHECK(std::abs(log_density(DirichletParams({2, 1}), SimplexPoint({0.5, 0.5}))) < 1e-15);
  // 30-digit evaluation: lnG(9) - lnG(2) - lnG(3) - lnG(4) + ln .2 + 2 ln .3 + 3 ln .5
  const double ref = 2.02287119019144163008956978776;
  CHECK(std::abs(log_density(DirichletParams({2, 3, 4}), SimplexPoint({0.2, 0.3, 0.5})) - ref) < 1e-13);
}

TEST_CASE("log_density matches lgamma formula at random points") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t l = 2 + rng.below(5);
    std::vector<double> a(l), phi(l);
    for (auto& x : a) x = oracle::uniform_in(rng, 0.3, 8.0);
    double s = 0.0;
    for (auto& x : phi) s += (x = -std::log(rng.uniform()));
    for (auto& x : phi) x /= s;
    const double got = log_density(DirichletParams(a), SimplexPoint(phi));
    CHECK(std::abs(got - oracle::dirichlet_log_density(a, phi)) < 1e-11);
    CHECK(std::abs(log_density_free(DirichletParams(a), SimplexPoint(phi).free()) - got) < 1e-12);
  }
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(DirichletParams({1.0}), DimensionError);
  CHECK_THROWS_AS(DirichletParams({1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(DirichletParams({1.0, -2.0}), DomainError);
  CHECK_THROWS_AS(SimplexPoint({0.5, 0.6}), DomainError);
  CHECK_THROWS_AS(SimplexPoint({1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(log_density(DirichletParams({1, 1, 1}), SimplexPoint({0.5, 0.5})), DimensionError);
  const std::vector<double> outside{0.7, 0.4};
  CHECK_THROWS_AS(log_density_free(DirichletParams({1, 1, 1}), outside), DomainError);
}

TEST_CASE("mean") {
  auto m = mean(DirichletParams({1, 1}));
  CHECK(m[0] == 0.5);
  CHECK(m[1] == 0.5);
  m = mean(DirichletParams({2, 6}));
  CHECK(m[0] == 0.25);
  CHECK(m[1] == 0.75);
  m = mean(DirichletParams({1, 1, 2}));
  CHECK(m[0] == 0.25);
  CHECK(m[1] == 0.25);
  CHECK(m[2] == 0.5);
}

TEST_CASE("sample is reproducible under a fixed seed") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const auto p = sample(DirichletParams({1, 1}), a);
    const auto q = sample(DirichletParams({1, 1}), b);
    CHECK(p[0] == q[0]);
    CHECK(p[0] > 0.0);
    CHECK(p[0] < 1.0);
  }
}

TEST_CASE("sample means") {
  for (const std::vector<double>& alpha : {std::vector<double>{5, 5}, std::vector<double>{1, 2, 3}}) {
    Rng rng(5);
    const DirichletParams dp(alpha);
    std::vector<double> acc(alpha.size(), 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const auto p = sample(dp, rng);
      for (std::size_t c = 0; c < alpha.size(); ++c) acc[c] += p[c];
    }
    const auto m = mean(dp);
    const double a0 = dp.total();
    for (std::size_t c = 0; c < alpha.size(); ++c) {
      const double est = acc[c] / n;
      CHECK(std::abs(est - m[c]) < 0.01);
      const double se = std::sqrt(alpha[c] * (a0 - alpha[c]) / (a0 * a0 * (a0 + 1)) / n);
      CHECK(std::abs(est - m[c]) < 3 * se);
    }
  }
}

TEST_CASE("tiny exponents stay interior") {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto p = sample(DirichletParams({0.01, 0.02, 0.05}), rng);
    for (std::size_t c = 0; c < 3; ++c) CHECK(p[c] > 0.0);
  }
}

TEST_CASE("density integrates to one") {
  boost::math::quadrature::tanh_sinh<double> ts, inner_ts;
  Rng rng(17);
  for (int t = 0; t < 5; ++t) {
    const double a1 = oracle::uniform_in(rng, 0.5, 5), a2 = oracle::uniform_in(rng, 0.5, 5);
    const DirichletParams dp({a1, a2});
    // xc is the distance to the nearer endpoint, so both coordinates stay exact.
    auto f = [&](double x, double xc) {
      const double lo = x < 0.5 ? x : 1.0 - xc, hi = x < 0.5 ? 1.0 - x : xc;
      return std::exp(log_density(dp, SimplexPoint({lo, hi})));
    };
    CHECK(std::abs(ts.integrate(f, 0.0, 1.0, 1e-10) - 1.0) < 1e-6);
  }
  for (int t = 0; t < 3; ++t) {
    std::vector<double> a(3);
    for (auto& x : a) x = oracle::uniform_in(rng, 0.5, 5);
    const DirichletParams dp(a);
    auto outer = [&](double x, double xc) {
      const double rest = x < 0.5 ? 1.0 - x : xc;
      auto inner = [&](double y, double yc) {
        const double z = y < 0.5 * rest ? rest - y : yc;
        const double yy = y < 0.5 * rest ? y : rest - yc;
        const double xx = x < 0.5 ? x : 1.0 - xc;
        // nodes this close to a face carry no mass at the tested precision
        if (std::min({xx, yy, z}) < 1e-280) return 0.0;
        return std::exp(log_density(dp, SimplexPoint({xx, yy, z})));
      };
      return inner_ts.integrate(inner, 0.0, rest, 1e-10);
    };
    CHECK(std::abs(ts.integrate(outer, 0.0, 1.0, 1e-9) - 1.0) < 1e-6);
  }
}

TEST_CASE("coordinate marginals follow Beta laws") {
  int passed = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = Rng::derive(2025, seed);
    const std::size_t l = 2 + rng.below(3);
    std::vector<double> a(l);
    for (auto& x : a) x = oracle::uniform_in(rng, 0.5, 5);
    const DirichletParams dp(a);
    const std::size_t n = 100000;
    std::vector<std::vector<double>> cols(l, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = sample(dp, rng);
      for (std::size_t c = 0; c < l; ++c) cols[c][i] = p[c];
    }
    bool ok = true;
    for (std::size_t c = 0; c < l; ++c) {
      const double ai = a[c], bi = dp.total() - a[c];
      const double d = oracle::ks_statistic(cols[c], [&](double x) { return boost::math::ibeta(ai, bi, x); });
      ok = ok && d < oracle::ks_critical_1pct(n);
    }
    passed += ok;
  }
  CHECK(passed >= 18);
}
