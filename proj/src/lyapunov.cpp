#include "subspec/lyapunov.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <iomanip>
#include <set>

#include "subspec/errors.hpp"
#include "subspec/parallel.hpp"

namespace subspec {

namespace {

constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();

bool singular_matrix(const IntMatrix& s) { return characteristic_polynomial(s)[0] == 0; }

// Norms weighted by the PF vector w of S^T: |x|_w = max_b |x_b| / w_b and its operator norm.
// Entrywise domination |M(xi)| <= S^T then gives ||M(xi, n)||_w <= theta^n exactly.
Eigen::VectorXd pf_weights(const Substitution& z) { return perron_data(z).left.cast<double>(); }

double weighted_norm(const CMatrix& a, const Eigen::VectorXd& w) {
  double best = 0;
  for (Eigen::Index b = 0; b < a.rows(); ++b) best = std::max(best, a.row(b).cwiseAbs().dot(w) / w(b));
  return best;
}

double weighted_norm(const CVector& x, const Eigen::VectorXd& w) {
  return x.cwiseAbs().cwiseQuotient(w).maxCoeff();
}

PointwiseExponent walk(const Substitution& z, const IntMatrix& s, TorusPoint xi, int n_max, const CVector* vec) {
  if (n_max < 1 || n_max > 10000) throw PreconditionError("n_max must lie in 1..10000");
  const int d = z.size();
  const Eigen::VectorXd w = pf_weights(z);
  PointwiseExponent out;
  CMatrix p = CMatrix::Identity(d, d);
  CVector v;
  if (vec) {
    if (vec->size() != d) throw PreconditionError("vector dimension does not match the alphabet");
    if (vec->norm() == 0) throw PreconditionError("vector z must be nonzero");
    v = *vec / weighted_norm(*vec, w);
  }
  long double log_scale = 0;
  bool dead = false;
  for (int n = 1; n <= n_max; ++n) {
    if (!dead) {
      const CMatrix m = cocycle_matrix(z, xi);
      double big, scale;
      if (vec) {
        const CVector next = m * v;
        big = next.cwiseAbs().maxCoeff();
        scale = m.cwiseAbs().maxCoeff() * v.cwiseAbs().maxCoeff() * d;
        if (big > 1e-14 * scale) v = next / big;
      } else {
        const CMatrix next = m * p;
        big = next.cwiseAbs().maxCoeff();
        scale = m.cwiseAbs().maxCoeff() * p.cwiseAbs().maxCoeff() * d;
        if (big > 1e-14 * scale) p = next / big;
      }
      if (!(big > 1e-14 * scale)) {
        dead = true;
        out.degenerate_from = n;
      } else {
        log_scale += std::log(static_cast<long double>(big));
      }
    }
    if (dead) {
      out.value.push_back(kNegInf);
    } else {
      const long double nrm = vec ? weighted_norm(v, w) : weighted_norm(p, w);
      out.value.push_back((log_scale + std::log(nrm)) / n);
    }
    if (n < n_max) xi = advance(s, xi);
  }
  const int tail = std::max(1, n_max / 5);
  out.proxy = *std::max_element(out.value.end() - tail, out.value.end());
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double radical_inverse(std::size_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

const unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

PointwiseExponent pointwise_exponent(const Substitution& z, const TorusPoint& xi, int n_max, const CVector* vec) {
  const IntMatrix s = substitution_matrix(z);
  if (singular_matrix(s)) throw PreconditionError("det(S) = 0: evaluate along a line omega*s instead");
  return walk(z, s, xi, n_max, vec);
}

PointwiseExponent pointwise_exponent_on_line(const Substitution& z, long double omega, const SuspensionParams& s,
                                             int n_max, const CVector* vec) {
  return walk(z, substitution_matrix(z), TorusPoint::on_line(omega, s), n_max, vec);
}

TorusPoint qmc_point(int d, std::size_t index, std::uint64_t seed) {
  if (d > static_cast<int>(std::size(kPrimes))) throw PreconditionError("alphabet too large for the Halton sampler");
  TorusPoint p = TorusPoint::zero(d);
  std::uint64_t h = splitmix64(seed ^ 0xA5A5A5A5DEADBEEFULL);
  for (int j = 0; j < d; ++j) {
    // Cranley-Patterson rotation by a seeded shift.
    const double shift = static_cast<double>(splitmix64(h + j) >> 11) * 0x1.0p-53;
    double x = radical_inverse(index + 1, kPrimes[j]) + shift;
    x -= std::floor(x);
    const Phase hi = Phase::from_real(x);
    const std::uint64_t low = splitmix64(splitmix64(seed + 0x1234567ULL * (j + 1)) ^ index);
    const Phase::Bits bits = (hi.bits() & ~Phase::Bits{0xFFFFFFFFFFFFFFFFULL}) | low;
    p.xi[j] = Phase::from_bits(bits);
  }
  return p;
}

ExponentEstimate global_exponent(const Substitution& z, int K, std::size_t samples, std::uint64_t seed, int threads) {
  if (K < 1 || K > 8) throw PreconditionError("depth K must lie in 1..8");
  if (samples < 1 || samples > 1'000'000) throw PreconditionError("samples must lie in 1..1000000");
  const IntMatrix s = substitution_matrix(z);
  const IntPoly cp = characteristic_polynomial(s);
  if (cp[0] == 0) throw PreconditionError("det(S) = 0: the toral endomorphism is not invertible");
  if (const auto orders = cyclotomic_factor_orders(cp); !orders.empty())
    throw PreconditionError("S has a root-of-unity eigenvalue: cyclotomic factor Phi_" + std::to_string(orders.front()) +
                            " = " + cyclotomic(orders.front()).to_string() + " divides " + cp.to_string());
  const int d = z.size();
  const Eigen::VectorXd w = pf_weights(z);
  // Pre-assigned sample slots, so the reduction order is fixed.
  std::vector<double> vals(samples * K);
  std::vector<char> bad(samples, 0);
  parallel_for(samples, threads, [&](std::size_t i) {
    TorusPoint xi = qmc_point(d, i, seed);
    CMatrix p = CMatrix::Identity(d, d);
    long double log_scale = 0;
    for (int k = 1; k <= K; ++k) {
      const CMatrix m = cocycle_matrix(z, xi);
      const CMatrix next = m * p;
      const double big = next.cwiseAbs().maxCoeff();
      if (!(big > 1e-14 * m.cwiseAbs().maxCoeff() * p.cwiseAbs().maxCoeff() * d)) {
        bad[i] = 1;
        return;
      }
      p = next / big;
      log_scale += std::log(static_cast<long double>(big));
      vals[i * K + (k - 1)] =
          static_cast<double>((log_scale + std::log(static_cast<long double>(weighted_norm(p, w)))) / k);
      if (k < K) xi = advance(s, xi);
    }
  });
  ExponentEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.log_theta = static_cast<double>(std::log(perron_data(z).theta));
  for (char b : bad) est.degenerate += b ? 1 : 0;
  est.used = samples - est.degenerate;
  if (est.degenerate * 1000 > samples)
    throw NumericalError("more than 0.1% of samples gave degenerate zero products (" + std::to_string(est.degenerate) +
                         " of " + std::to_string(samples) + ")");
  for (int k = 0; k < K; ++k) {
    long double sum = 0, sq = 0;
    for (std::size_t i = 0; i < samples; ++i) {
      if (bad[i]) continue;
      const long double v = vals[i * K + k];
      sum += v;
      sq += v * v;
    }
    const long double n = static_cast<long double>(est.used);
    const long double mean = sum / n;
    const long double var = n > 1 ? std::max(0.0L, (sq - n * mean * mean) / (n - 1)) : 0.0L;
    est.estimate.push_back(static_cast<double>(mean));
    est.std_error.push_back(static_cast<double>(std::sqrt(var / n)));
    const double prev = est.running_min.empty() ? std::numeric_limits<double>::infinity() : est.running_min.back();
    est.running_min.push_back(std::min(prev, est.estimate.back()));
  }
  const auto it = std::min_element(est.estimate.begin(), est.estimate.end());
  est.argmin = static_cast<int>(it - est.estimate.begin()) + 1;
  est.value = *it;
  est.value_se = est.std_error[est.argmin - 1];
  return est;
}

CriterionResult singularity_verdict_irreducible(const Substitution& z, const ExponentEstimate& est) {
  const auto rep = pisot_report(z);
  CriterionResult c;
  c.id = "lyapunov-singularity";
  c.theorem = Theorem::LyapunovHalfLogTheta;
  const double threshold = 0.5 * static_cast<double>(std::log(rep.theta));
  c.evidence["threshold_half_log_theta"] = threshold;
  c.evidence["estimate"] = est.value;
  c.evidence["stderr"] = est.value_se;
  c.evidence["depth"] = est.argmin;
  c.evidence["samples"] = est.used;
  c.evidence["seed"] = est.seed;
  c.evidence["charpoly"] = rep.charpoly.to_string();
  if (!rep.irreducible) {
    c.verdict = Verdict::Inconclusive;
    c.statement = "irreducibility of the characteristic polynomial undecided";
    return c;
  }
  if (!*rep.irreducible) {
    c.verdict = Verdict::NotApplicable;
    c.statement = "characteristic polynomial is reducible";
    return c;
  }
  if (est.value + 3 * est.value_se < threshold) {
    c.verdict = Verdict::Holds;
    c.statement = "singular";
  } else {
    c.verdict = Verdict::Inconclusive;
    c.statement = "exponent estimate not below half log theta by 3 standard errors";
  }
  return c;
}

DimensionReport local_dimension(const Substitution& z, const SuspensionParams& s, const TestFunction& f,
                                long double omega, int n_max) {
  const CVector vec = function_transform(z, f, s, omega);
  if (vec.norm() == 0) throw PreconditionError("test function transform vanishes at this frequency");
  const auto pw = pointwise_exponent_on_line(z, omega, s, n_max, &vec);
  const double log_theta = static_cast<double>(std::log(perron_data(z).theta));
  DimensionReport rep;
  rep.omega = static_cast<double>(omega);
  rep.exponent = static_cast<double>(pw.proxy);
  rep.note = "finite-n exponent proxy (max over the last 20% of depths up to n=" + std::to_string(n_max) + ")";
  if (!(pw.proxy > 0)) {
    rep.at_least_two = true;
    rep.branch = ">=2";
  } else {
    rep.branch = "formula";
    rep.dimension = std::clamp(2.0 - 2.0 * static_cast<double>(pw.proxy) / log_theta, 0.0, 2.0);
  }
  return rep;
}

DimensionReport dimension_at_zero(const Substitution& z, const SuspensionParams& s, const TestFunction& f) {
  const CVector zv = function_transform(z, f, s, 0.0L);
  DimensionReport rep;
  rep.omega = 0;
  if (zv.norm() == 0) throw PreconditionError("test function has zero transform at 0");
  const Eigen::MatrixXd st = substitution_matrix(z).transpose().cast<double>();
  Eigen::EigenSolver<Eigen::MatrixXd> es(st);
  const Eigen::VectorXcd lam = es.eigenvalues();
  const Eigen::MatrixXcd V = es.eigenvectors();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
  const auto sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(cond < 1e10)) {
    rep.branch = "projection unresolved";
    rep.note = "eigenvector matrix of S^T is ill-conditioned (defective or clustered spectrum)";
    return rep;
  }
  const Eigen::VectorXcd c = V.partialPivLu().solve(zv);
  std::vector<int> order(lam.size());
  for (int i = 0; i < lam.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(lam(a)) > std::abs(lam(b)); });
  const double log_theta = static_cast<double>(std::log(perron_data(z).theta));
  int group = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double mod = std::abs(lam(order[i]));
    std::size_t j = i;
    Eigen::VectorXcd proj = Eigen::VectorXcd::Zero(zv.size());
    while (j < order.size() && std::abs(std::abs(lam(order[j])) - mod) <= 1e-9 * std::max(1.0, mod)) {
      proj += c(order[j]) * V.col(order[j]);
      ++j;
    }
    ++group;
    if (proj.norm() > 1e-9 * zv.norm()) {
      rep.k = group;
      rep.exponent = mod > 0 ? std::log(mod) : -std::numeric_limits<double>::infinity();
      if (group == 1) {
        rep.branch = "point-mass";
        rep.dimension = 0.0;
        rep.note = "test function has nonzero mean";
      } else if (mod > 1.0 + 1e-12) {
        rep.branch = "formula";
        rep.dimension = 2.0 - 2.0 * std::log(mod) / log_theta;
      } else {
        rep.branch = ">=2";
        rep.at_least_two = true;
      }
      return rep;
    }
    i = j;
  }
  rep.branch = "projection unresolved";
  rep.note = "all projections vanish within tolerance";
  return rep;
}

namespace {

using Pop128 = std::vector<__int128>;

// S^k l(v) for k = 0..K-1, exact.
std::vector<Pop128> population_orbit(const IntMatrix& s, const Word& v, int K) {
  const int d = static_cast<int>(s.rows());
  Pop128 p(d, 0);
  for (Letter c : v) ++p[c];
  std::vector<Pop128> out;
  for (int k = 0; k < K; ++k) {
    out.push_back(p);
    Pop128 next(d, 0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        next[i] += static_cast<__int128>(s(i, j)) * p[j];
        if (next[i] > (static_cast<__int128>(1) << 100)) throw NumericalError("population vector overflow");
      }
    p = next;
  }
  return out;
}

long double distance_at(const std::vector<Phase>& step, const Pop128& pop) {
  Phase acc;
  for (std::size_t j = 0; j < step.size(); ++j) acc += step[j].times(pop[j]);
  return acc.distance_to_integer();
}

std::vector<Phase> line_steps(const SuspensionParams& s, long double omega) {
  std::vector<Phase> out;
  for (Eigen::Index j = 0; j < s.heights.size(); ++j) out.push_back(Phase::from_real(omega * s.heights(j)));
  return out;
}

}  // namespace

std::vector<long double> return_word_distances(const Substitution& z, const SuspensionParams& s, const Word& v,
                                               long double omega, int K) {
  const auto orbit = population_orbit(substitution_matrix(z), v, K);
  const auto step = line_steps(s, omega);
  std::vector<long double> out;
  for (const auto& p : orbit) out.push_back(distance_at(step, p));
  return out;
}

double return_word_bound(const Substitution& z, const SuspensionParams& s, const Word& v, long double omega, int n,
                         double c1) {
  if (!(c1 > 0 && c1 < 1)) throw PreconditionError("c1 must lie in (0,1)");
  if (v.empty()) throw PreconditionError("empty word");
  const auto good = good_return_words(z, v.size());
  if (std::find(good.words.begin(), good.words.end(), v) == good.words.end())
    throw PreconditionError("'" + z.format(v) + "' is not a good return word");
  double prod = 1;
  for (long double dist : return_word_distances(z, s, v, omega, n))
    prod *= 1.0 - c1 * static_cast<double>(dist * dist);
  return prod;
}

void EigenvalueScanResult::write_csv(std::ostream& out) const {
  out << std::setprecision(17) << "omega,max_distance_last5,candidate\n";
  for (std::size_t i = 0; i < omega.size(); ++i)
    out << omega[i] << "," << max_distance_last5[i] << "," << (candidate[i] ? 1 : 0) << "\n";
}

std::vector<double> EigenvalueScanResult::candidates() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < omega.size(); ++i)
    if (candidate[i]) out.push_back(omega[i]);
  return out;
}

namespace {

EigenvalueScanResult scan_impl(const Substitution& z, const SuspensionParams& s, const std::vector<double>& omegas,
                               int K, double epsilon, int threads) {
  if (K < 5 || K > 40) throw PreconditionError("scan depth K must lie in 5..40");
  EigenvalueScanResult res;
  res.K = K;
  res.epsilon = epsilon;
  // Every return word, not only the good ones: with a single word a lone length can
  // sit near an integer over a few depths by accident.
  res.words = return_words(z, 1000);
  if (res.words.empty()) throw PreconditionError("no return words found");
  const IntMatrix sm = substitution_matrix(z);
  std::vector<std::vector<Pop128>> orbits;
  for (const auto& v : res.words) orbits.push_back(population_orbit(sm, v, K + 1));
  res.omega = omegas;
  res.max_distance_last5.assign(omegas.size(), 0.0);
  std::vector<char> cand(omegas.size(), 0);
  parallel_for(omegas.size(), threads, [&](std::size_t i) {
    const auto step = line_steps(s, omegas[i]);
    long double worst = 0;
    for (const auto& orb : orbits)
      for (int k = K - 4; k <= K; ++k) worst = std::max(worst, distance_at(step, orb[k]));
    res.max_distance_last5[i] = static_cast<double>(worst);
    cand[i] = worst < epsilon;
  });
  res.candidate.assign(cand.begin(), cand.end());
  return res;
}

}  // namespace

EigenvalueScanResult eigenvalue_scan(const Substitution& z, const SuspensionParams& s, const FrequencyGrid& grid, int K,
                                     double epsilon, int threads) {
  if (grid.points == 0 || !(grid.hi > grid.lo)) throw PreconditionError("empty frequency range");
  std::vector<double> omegas(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) omegas[i] = grid.omega(i);
  return scan_impl(z, s, omegas, K, epsilon, threads);
}

EigenvalueScanResult eigenvalue_scan_at(const Substitution& z, const SuspensionParams& s,
                                        const std::vector<double>& omegas, int K, double epsilon) {
  return scan_impl(z, s, omegas, K, epsilon, 1);
}

UpperBoundCheck chi_upper_bound_check(const Substitution& z, std::size_t trials, std::uint64_t seed, int n,
                                      int threads) {
  const IntMatrix s = substitution_matrix(z);
  const int d = z.size();
  UpperBoundCheck out;
  out.trials = trials;
  out.on_line = singular_matrix(s);
  const double log_theta = static_cast<double>(std::log(perron_data(z).theta));
  const auto unit = SuspensionParams::unit(d);
  std::vector<double> excess(trials, -std::numeric_limits<double>::infinity());
  std::vector<char> bad(trials, 0);
  parallel_for(trials, threads, [&](std::size_t i) {
    TorusPoint xi = qmc_point(d, i, seed);
    if (out.on_line) xi = TorusPoint::on_line(xi.xi[0].value(), unit);
    const auto p = cocycle_product_unchecked(z, s, xi, n);
    if (p.degenerate()) {
      bad[i] = 1;
      return;
    }
    excess[i] = static_cast<double>(p.log_norm() / n) - log_theta;
  });
  out.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trials; ++i) {
    out.degenerate += bad[i];
    out.max_excess = std::max(out.max_excess, excess[i]);
  }
  return out;
}

}  // namespace subspec
