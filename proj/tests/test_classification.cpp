#include <doctest.h>

#include <Eigen/LU>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "oracle.hpp"
#include "subspec/catalog.hpp"
#include "subspec/classification.hpp"
#include "subspec/errors.hpp"

using namespace subspec;

namespace {
const CriterionResult& find(const SpectrumVerdict& v, const std::string& id) {
  for (const auto& c : v.criteria)
    if (c.id == id) return c;
  FAIL("criterion missing: " << id);
  return v.criteria.front();
}
// gcd of return times of u[ell] over a long prefix, computed directly
long long scan_gcd(const std::string& u, std::size_t ell) {
  long long g = 0;
  for (std::size_t k = ell + 1; k < u.size(); ++k)
    if (u[k] == u[ell]) g = std::gcd(g, static_cast<long long>(k - ell));
  return g;
}
}  // namespace

TEST_CASE("constant length") {
  CHECK(constant_length(catalog_lookup("thue-morse")) == 2);
  CHECK_FALSE(constant_length(catalog_lookup("fibonacci")));
  CHECK(constant_length(catalog_lookup("rudin-shapiro")) == 2);
}

TEST_CASE("height") {
  for (const char* name : {"period-doubling", "thue-morse", "rudin-shapiro", "bijective-3"}) {
    const auto z = catalog_lookup(name);
    const auto h = height(z);
    CHECK(h.h == 1);
    CHECK(h.confirmed);
    CHECK(std::gcd(h.h, static_cast<std::int64_t>(h.q)) == 1);
    CHECK(h.g0 % h.h == 0);
    for (std::size_t ell = 1; ell <= 5; ++ell) CHECK(height(z, ell).h == h.h);
  }
  // height 3: 0 -> 0 1 2, 1 -> 1 2 0 ... every return time of 0 a multiple of 3
  const auto z3 = parse_substitution("0 -> 0 1 2 0\n1 -> 1 2 0 1\n2 -> 2 0 1 2\n");
  const std::string u = oracle::expand({{'0', "0120"}, {'1', "1201"}, {'2', "2012"}}, "0", 6);
  const auto h3 = height(z3);
  CHECK(h3.g0 == scan_gcd(u, 0));
  CHECK(h3.h == 3);
  CHECK_THROWS_AS(dekking_coincidence(z3), PreconditionError);
  CHECK_THROWS(height(catalog_lookup("fibonacci")));
}

TEST_CASE("coincidence and column semigroup") {
  const auto pd = dekking_coincidence(catalog_lookup("period-doubling"));
  CHECK(pd.coincidence);
  CHECK(pd.k == 1);
  CHECK_FALSE(dekking_coincidence(catalog_lookup("thue-morse")).coincidence);
  CHECK_FALSE(dekking_coincidence(catalog_lookup("rudin-shapiro")).coincidence);
  for (const auto& name : {"period-doubling", "thue-morse", "rudin-shapiro", "bijective-3"}) {
    const auto z = catalog_lookup(name);
    const auto sg = column_semigroup(z);
    const auto again = close_semigroup(sg.closure);
    std::set<ColumnMap> a(sg.closure.begin(), sg.closure.end()), b(again.closure.begin(), again.closure.end());
    CHECK(a == b);
    CHECK(a.size() <= std::pow(z.size(), z.size()));
    CHECK(dekking_coincidence(z).coincidence == dekking_coincidence(power(z, 2)).coincidence);
  }
  // brute force for PD: z(0) = 01, z(1) = 00, column 1 maps both letters to 0
  const auto cols = column_maps(catalog_lookup("period-doubling"));
  CHECK(cols[1] == ColumnMap{1, 0});
  CHECK(cols[0] == ColumnMap{0, 0});
}

TEST_CASE("bijectivity") {
  CHECK(bijectivity(catalog_lookup("thue-morse")).kind == Bijectivity::AbelianBijective);
  CHECK(bijectivity(catalog_lookup("bijective-3")).kind == Bijectivity::Bijective);
  CHECK(bijectivity(catalog_lookup("period-doubling")).kind == Bijectivity::NotBijective);
  // bijective-3 columns: (0,1,2)->(0,1,2), (1,2,0), (0,2,1): the last two do not commute
  const auto cols = column_maps(catalog_lookup("bijective-3"));
  auto comp = [](const ColumnMap& f, const ColumnMap& g) {
    ColumnMap h(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) h[i] = f[g[i]];
    return h;
  };
  CHECK(comp(cols[1], cols[2]) != comp(cols[2], cols[1]));
}

TEST_CASE("Pisot report") {
  const auto f = pisot_report(catalog_lookup("fibonacci"));
  CHECK(f.irreducible == true);
  CHECK(f.irreducible_pisot);
  CHECK(f.charpoly == IntPoly({-1, -1, 1}));
  const auto np = pisot_report(catalog_lookup("non-pisot-0111"));
  CHECK(np.irreducible == true);
  CHECK_FALSE(np.pf_is_pisot);
  const double r13 = std::sqrt(13.0);
  CHECK(std::abs(np.eigenvalues[0] - std::complex<double>((1 + r13) / 2, 0)) < 1e-10);
  CHECK(std::abs(np.eigenvalues[1] - std::complex<double>((1 - r13) / 2, 0)) < 1e-10);
  const auto tm = pisot_report(catalog_lookup("thue-morse"));
  CHECK(tm.irreducible == false);
  CHECK(tm.pf_is_pisot);
  const auto rs = pisot_report(catalog_lookup("rudin-shapiro"));
  CHECK(rs.charpoly == IntPoly({0, 4, -2, -2, 1}));
  CHECK(rs.charpoly.divisible_by(IntPoly({-2, 0, 1})));
  for (const auto& name : catalog_names()) {
    const auto z = catalog_lookup(name);
    const auto r = pisot_report(z);
    const IntMatrix s = substitution_matrix(z);
    std::complex<double> sum = 0, prod = 1;
    for (auto e : r.eigenvalues) sum += e, prod *= e;
    CHECK(std::abs(sum - static_cast<double>(s.trace())) < 1e-8);
    CHECK(std::abs(prod - Eigen::MatrixXd(s.cast<double>()).determinant()) < 1e-8);
    CHECK(r.charpoly.degree() == z.size());
  }
}

TEST_CASE("weak mixing and singularity criteria") {
  CHECK(weak_mixing_selfsimilar(catalog_lookup("fibonacci")).verdict == Verdict::Fails);
  CHECK(weak_mixing_selfsimilar(catalog_lookup("non-pisot-0111")).verdict == Verdict::Holds);
  CHECK(weak_mixing_selfsimilar(catalog_lookup("thue-morse")).verdict == Verdict::Fails);
  CHECK(sqrtq_singularity(catalog_lookup("thue-morse")).verdict == Verdict::Holds);
  CHECK(sqrtq_singularity(catalog_lookup("rudin-shapiro")).verdict == Verdict::Inconclusive);
  CHECK(sqrtq_singularity(catalog_lookup("period-doubling")).verdict == Verdict::Holds);
  CHECK_THROWS(sqrtq_singularity(catalog_lookup("fibonacci")));
  CHECK(bijective_two_letter_singularity(catalog_lookup("thue-morse")).verdict == Verdict::Holds);
  CHECK(bijective_two_letter_singularity(parse_substitution("0 -> 011\n1 -> 100\n")).verdict == Verdict::Holds);
  CHECK_THROWS_AS(bijective_two_letter_singularity(catalog_lookup("period-doubling")), PreconditionError);
}

TEST_CASE("spectrum summary") {
  const auto pd = spectrum_summary(catalog_lookup("period-doubling"));
  CHECK(pd.headline.rfind("discrete", 0) == 0);
  CHECK(find(pd, "coincidence").verdict == Verdict::Holds);
  const auto rs = spectrum_summary(catalog_lookup("rudin-shapiro"));
  CHECK(rs.headline.find("mixed") != std::string::npos);
  CHECK(find(rs, "sqrtq-singularity").verdict == Verdict::Inconclusive);
  const auto f = spectrum_summary(catalog_lookup("fibonacci"));
  CHECK(f.headline == "Pisot case: not weakly mixing; pure discreteness open");
  const auto tm = spectrum_summary(catalog_lookup("thue-morse"));
  CHECK(tm.eigenvalue_group == "e(Z(2) x Z/1Z)");
  const auto tags = all_theorem_tags();
  for (const auto& name : catalog_names())
    for (const auto& c : spectrum_summary(catalog_lookup(name)).criteria)
      CHECK(std::find(tags.begin(), tags.end(), theorem_tag(c.theorem)) != tags.end());
}

TEST_CASE("two-letter polynomial") {
  const auto signs = two_letter_signs(catalog_lookup("thue-morse"));
  for (double w : {0.0, 0.1, 0.25, 0.37, 0.5}) CHECK(two_letter_polynomial(signs, w) == doctest::Approx(1 - std::cos(2 * M_PI * w)));
}

TEST_CASE("Pisot power distances") {
  const IntPoly fib({-1, -1, 1});
  const auto d = pisot_power_distances(fib, {1, 0}, 40);
  CHECK(d.exact);
  const double phi = (1 + std::sqrt(5.0)) / 2;
  CHECK(static_cast<double>(d.distance[0]) == 0);
  CHECK(static_cast<double>(d.distance[5]) == doctest::Approx(std::pow(phi, -5)).epsilon(1e-9));
  // Lucas oracle: phi^k + (-1/phi)^k = L_k, so ||phi^k|| = phi^-k for k >= 2
  for (int k = 1; k <= 40; ++k) CHECK(static_cast<double>(d.distance[k]) <= std::pow(phi - 1, k) * 1.01);
  // phi^k - L_k = -(-1/phi)^k, so the distance is phi^-k itself once k >= 2
  for (int k = 2; k <= 40; ++k) CHECK(static_cast<double>(d.distance[k]) == doctest::Approx(std::pow(phi, -k)).epsilon(1e-9));
  const auto np = pisot_power_distances(IntPoly({-3, -1, 1}), {1, 0}, 30);
  double mn = 1;
  for (int k = 1; k <= 30; ++k) mn = std::min(mn, static_cast<double>(np.distance[k]));
  CHECK(mn > 0.01);
}

TEST_CASE("Bernoulli convolution transform") {
  CHECK(std::abs(bernoulli_fourier(0.5, 0.5, 0.0, 100).value - 1.0) < 1e-15);
  CHECK(std::abs(bernoulli_fourier(0.5, 0.5, 0.25, 200).value) < 1e-12);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 8.0);
  for (int i = 0; i < 100; ++i) {
    const double xi = u(rng);
    const auto v = bernoulli_fourier(0.5, 0.5, xi, 200);
    CHECK(std::abs(v.value - std::sin(4 * M_PI * xi) / (4 * M_PI * xi)) < 1e-10);
  }
  // non-decay along powers of the golden ratio
  const double phi = (1 + std::sqrt(5.0)) / 2;
  double lo = 1, hi = 0;
  for (int m : {10, 20, 30}) {
    const double a = std::abs(bernoulli_fourier(1 / phi, 0.5, std::pow(phi, m), 10000).value);
    lo = std::min(lo, a), hi = std::max(hi, a);
  }
  CHECK(lo > 1e-4);
  CHECK(hi / lo < 2);
  const auto t = bernoulli_fourier(0.5, 0.5, 3.0, 10);
  CHECK(t.tail_bound == doctest::Approx(2 * M_PI * 3.0 * std::pow(0.5, 10) / 0.5));
}
