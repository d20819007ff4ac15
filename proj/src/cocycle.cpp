#include "subspec/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

#include "subspec/classification.hpp"
#include "subspec/errors.hpp"
#include "subspec/parallel.hpp"

namespace subspec {

namespace {
constexpr long double kTau = 2.0L * std::numbers::pi_v<long double>;
constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();
}  // namespace

TorusPoint TorusPoint::from_reals(const std::vector<long double>& x) {
  TorusPoint p;
  for (long double v : x) p.xi.push_back(Phase::from_real(v));
  return p;
}

TorusPoint TorusPoint::on_line(long double omega, const SuspensionParams& s) {
  TorusPoint p;
  for (Eigen::Index j = 0; j < s.heights.size(); ++j) p.xi.push_back(Phase::from_real(omega * s.heights(j)));
  return p;
}

std::vector<long double> TorusPoint::values() const {
  std::vector<long double> out;
  for (const auto& p : xi) out.push_back(p.value());
  return out;
}

TorusPoint advance(const IntMatrix& s, const TorusPoint& x) {
  const int d = x.size();
  TorusPoint out = TorusPoint::zero(d);
  for (int b = 0; b < d; ++b)
    for (int c = 0; c < d; ++c)
      if (s(c, b) != 0) out.xi[b] += x.xi[c].times(s(c, b));
  return out;
}

CMatrix cocycle_matrix(const Substitution& z, const TorusPoint& xi) {
  const int d = z.size();
  if (xi.size() != d) throw PreconditionError("torus point dimension does not match the alphabet");
  CMatrix m = CMatrix::Zero(d, d);
  for (int b = 0; b < d; ++b) {
    Phase acc;
    for (Letter c : z.rule(b)) {
      m(b, c) += acc.character();
      acc += xi.xi[c];
    }
  }
  return m;
}

bool CocycleProduct::degenerate() const { return log_scale == kNegInf; }

CMatrix CocycleProduct::reconstruct() const {
  if (degenerate()) return CMatrix::Zero(normalized.rows(), normalized.cols());
  return normalized * static_cast<double>(std::exp(log_scale));
}

long double CocycleProduct::log_norm() const {
  if (degenerate()) return kNegInf;
  return log_scale + std::log(static_cast<long double>(normalized.norm()));
}

CocycleProduct cocycle_product_unchecked(const Substitution& z, const IntMatrix& s, TorusPoint xi, int n) {
  if (n < 0) throw PreconditionError("product depth must be non-negative");
  const int d = z.size();
  CocycleProduct p;
  p.normalized = CMatrix::Identity(d, d);
  p.depth = n;
  for (int i = 0; i < n; ++i) {
    if (!p.degenerate()) {
      const CMatrix m = cocycle_matrix(z, xi);
      CMatrix next = m * p.normalized;
      const double big = next.cwiseAbs().maxCoeff();
      // Everything below rounding level of the inputs counts as an exact zero.
      const double scale = m.cwiseAbs().maxCoeff() * p.normalized.cwiseAbs().maxCoeff() * d;
      if (!(big > 1e-14 * scale)) {
        p.normalized = CMatrix::Zero(d, d);
        p.log_scale = kNegInf;
      } else {
        p.normalized = next / big;
        p.log_scale += std::log(static_cast<long double>(big));
      }
    }
    if (i + 1 < n) xi = advance(s, xi);
  }
  return p;
}

CocycleProduct cocycle_product(const Substitution& z, const TorusPoint& xi, int n) {
  const IntMatrix s = substitution_matrix(z);
  const IntPoly cp = characteristic_polynomial(s);
  if (cp[0] == 0)
    throw PreconditionError("det(S) = 0: full-torus products are not exposed; use products along a line omega*s");
  return cocycle_product_unchecked(z, s, xi, n);
}

CocycleProduct cocycle_product_on_line(const Substitution& z, long double omega, const SuspensionParams& s, int n) {
  return cocycle_product_unchecked(z, substitution_matrix(z), TorusPoint::on_line(omega, s), n);
}

std::complex<double> twisted_sum(const Word& v, Letter a, long double omega, const SuspensionParams& s) {
  std::vector<std::complex<double>> phi(s.size(), 0.0);
  phi.at(a) = 1.0;
  return twisted_sum(v, phi, omega, s);
}

std::complex<double> twisted_sum(const Word& v, const std::vector<std::complex<double>>& phi, long double omega,
                                 const SuspensionParams& s) {
  // Prefix phases are accumulated exactly on the 128-bit circle.
  std::vector<Phase> step;
  for (Eigen::Index j = 0; j < s.heights.size(); ++j) step.push_back(Phase::from_real(omega * s.heights(j)));
  std::complex<double> acc = 0;
  Phase ph;
  for (Letter c : v) {
    if (phi[c] != 0.0) acc += phi[c] * ph.character();
    ph += step[c];
  }
  return acc;
}

CocycleProduct pi_matrix(const Substitution& z, long double omega, int n, int k, const SuspensionParams& s) {
  if (k < 0) throw PreconditionError("level must be non-negative");
  const IntMatrix sm = substitution_matrix(z);
  TorusPoint xi = TorusPoint::on_line(omega, s);
  for (int i = 0; i < k; ++i) xi = advance(sm, xi);
  return cocycle_product_unchecked(z, sm, xi, n);
}

void DensityGrid::write_csv(std::ostream& out) const {
  out << "# grid [" << std::setprecision(17) << grid.lo << "," << grid.hi << ") points=" << grid.points
      << " level=" << level;
  if (!label.empty()) out << " " << label;
  out << "\n";
  if (is_scalar()) {
    out << "omega,density\n";
    for (std::size_t i = 0; i < scalar.size(); ++i) out << grid.omega(i) << "," << scalar[i] << "\n";
    return;
  }
  const int d = matrices.empty() ? 0 : static_cast<int>(matrices.front().rows());
  auto name = [&](int a) { return a < static_cast<int>(tokens.size()) ? tokens[a] : std::to_string(a); };
  out << "omega";
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) out << ",re_" << name(a) << name(b) << ",im_" << name(a) << name(b);
  out << "\n";
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    out << grid.omega(i);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) out << "," << matrices[i](a, b).real() << "," << matrices[i](a, b).imag();
    out << "\n";
  }
}

double DensityGrid::integral() const {
  double acc = 0;
  for (double v : scalar) acc += v;
  return acc * grid.step();
}

std::complex<double> DensityGrid::integral(int a, int b) const {
  std::complex<double> acc = 0;
  for (const auto& m : matrices) acc += m(a, b);
  return acc * grid.step();
}

DensityGrid riesz_density(const Substitution& z, int n, const FrequencyGrid& grid, const SuspensionParams& s,
                          int threads) {
  if (n < 0) throw PreconditionError("level must be non-negative");
  if (grid.points == 0 || !(grid.hi > grid.lo)) throw PreconditionError("empty frequency grid");
  const auto pd = perron_data(z);
  const long double norm = pd.right.sum() * pd.left.sum();
  const long double log_theta_n = n * std::log(pd.theta);
  DensityGrid out;
  out.grid = grid;
  out.level = n;
  out.label = "level-" + std::to_string(n) + " approximant";
  out.tokens = z.tokens();
  out.matrices.resize(grid.points);
  parallel_for(grid.points, threads, [&](std::size_t i) {
    const auto p = pi_matrix(z, grid.omega(i), n, 0, s);
    if (p.degenerate()) {
      out.matrices[i] = CMatrix::Zero(z.size(), z.size());
      return;
    }
    const double f = static_cast<double>(std::exp(2 * p.log_scale - log_theta_n) / norm);
    out.matrices[i] = (p.normalized.transpose() * p.normalized.conjugate()) * f;
  });
  return out;
}

DensityGrid tm_scalar_riesz(int N, const FrequencyGrid& grid) {
  if (N < 0 || N > 40) throw PreconditionError("Thue-Morse product needs 0 <= N <= 40");
  DensityGrid out;
  out.grid = grid;
  out.level = N;
  out.label = "level-" + std::to_string(N) + " approximant";
  out.scalar.resize(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) {
    Phase x = Phase::from_real(grid.omega(i));
    double v = 1;
    for (int n = 0; n < N; ++n) {
      v *= std::norm(std::complex<double>(1.0, 0.0) - x.character()) / 2.0;
      x = x.times(std::int64_t{2});
    }
    out.scalar[i] = v;
  }
  return out;
}

DensityGrid contract(const DensityGrid& m, const std::vector<std::complex<double>>& phi) {
  DensityGrid out;
  out.grid = m.grid;
  out.level = m.level;
  out.label = m.label;
  out.scalar.resize(m.matrices.size());
  if (!m.matrices.empty() && static_cast<Eigen::Index>(phi.size()) != m.matrices.front().rows())
    throw InputError("weight vector length does not match the alphabet");
  CVector v(static_cast<Eigen::Index>(phi.size()));
  for (std::size_t a = 0; a < phi.size(); ++a) v(static_cast<Eigen::Index>(a)) = phi[a];
  for (std::size_t i = 0; i < m.matrices.size(); ++i)
    out.scalar[i] = (v.transpose() * m.matrices[i] * v.conjugate())(0, 0).real();
  return out;
}

TestFunction TestFunction::indicator(int d, Letter a, int level) {
  TestFunction f;
  f.kind = level > 0 ? Kind::LevelIndicator : Kind::Simple;
  f.b.assign(d, 0.0);
  f.b.at(a) = 1.0;
  f.level = level;
  return f;
}

bool TestFunction::is_zero() const {
  return std::all_of(b.begin(), b.end(), [](std::complex<double> x) { return x == 0.0; });
}

std::complex<double> segment_transform(long double omega, long double len) {
  const long double x = omega * len;
  const long double pix = std::numbers::pi_v<long double> * x;
  const long double sinc = std::abs(pix) < 1e-12L ? 1.0L : std::sin(pix) / pix;
  const std::complex<long double> e = std::polar(1.0L, -pix);
  const auto v = e * (len * sinc);
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

namespace {

RealVector level_lengths(const Substitution& z, const SuspensionParams& s, int level) {
  // |z^k(j)|_s = ((S^T)^k s)_j
  const Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> st = substitution_matrix(z).transpose().cast<long double>();
  RealVector len = s.heights;
  for (int i = 0; i < level; ++i) len = st * len;
  return len;
}

// log of sum_gamma |z^m(gamma)|_s
long double log_total_length(const Substitution& z, const SuspensionParams& s, int m) {
  const Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> st = substitution_matrix(z).transpose().cast<long double>();
  RealVector v = s.heights;
  long double logacc = 0;
  for (int i = 0; i < m; ++i) {
    v = st * v;
    const long double mx = v.maxCoeff();
    v /= mx;
    logacc += std::log(mx);
  }
  return logacc + std::log(v.sum());
}

}  // namespace

CVector function_transform(const Substitution& z, const TestFunction& f, const SuspensionParams& s, long double omega) {
  const int d = z.size();
  if (static_cast<int>(f.b.size()) != d) throw InputError("test function weights do not match the alphabet");
  const RealVector len = level_lengths(z, s, f.kind == TestFunction::Kind::LevelIndicator ? f.level : 0);
  CVector out(d);
  for (int j = 0; j < d; ++j) out(j) = f.b[j] * segment_transform(omega, len(j));
  return out;
}

DensityGrid spectral_density_for_function(const Substitution& z, const SuspensionParams& s, const TestFunction& f,
                                          int n, const FrequencyGrid& grid, int threads) {
  if (n < 0) throw PreconditionError("level must be non-negative");
  const int k = f.kind == TestFunction::Kind::LevelIndicator ? f.level : 0;
  DensityGrid out;
  out.grid = grid;
  out.level = n;
  out.label = "level-" + std::to_string(n) + " approximant";
  out.scalar.assign(grid.points, 0.0);
  if (f.is_zero()) return out;
  const long double log_total = log_total_length(z, s, n + k);
  parallel_for(grid.points, threads, [&](std::size_t i) {
    const long double w = grid.omega(i);
    const CVector psi = function_transform(z, f, s, w);
    const auto p = pi_matrix(z, w, n, k, s);
    if (p.degenerate()) return;
    const CVector v = p.normalized * psi;
    out.scalar[i] = static_cast<double>(static_cast<long double>(v.squaredNorm()) * std::exp(2 * p.log_scale - log_total));
  });
  return out;
}

namespace {

std::complex<double> prefix_sum(const Substitution& z, const std::vector<std::complex<double>>& b, double omega,
                                std::size_t N) {
  if (static_cast<int>(b.size()) != z.size()) throw InputError("weight vector length does not match the alphabet");
  const auto seed = default_fixed_point(z);
  const Word u = fixed_point_prefix(z, seed.letter, N);
  const Phase step = Phase::from_real(omega);
  Phase ph;
  std::complex<double> acc = 0;
  for (Letter c : u) {
    acc += b[c] * ph.character();
    ph += step;
  }
  return acc;
}

}  // namespace

double gn_statistic(const Substitution& z, const std::vector<std::complex<double>>& b, double omega, std::size_t N) {
  if (N == 0) throw PreconditionError("N must be positive");
  return std::norm(prefix_sum(z, b, omega, N)) / static_cast<double>(N);
}

double ball_bound(const Substitution& z, const std::vector<std::complex<double>>& b, double omega, double r) {
  if (!(r > 0 && r <= 0.5)) throw PreconditionError("radius must lie in (0, 1/2]");
  const auto N = static_cast<std::size_t>(std::floor(1.0 / (2.0 * r)));
  return std::numbers::pi * std::numbers::pi / (4.0 * static_cast<double>(N)) * gn_statistic(z, b, omega, N);
}

PointMassEstimate point_mass_estimate(const Substitution& z, const std::vector<std::complex<double>>& b, double omega,
                                      std::size_t N) {
  PointMassEstimate est;
  for (std::size_t m : {N, 2 * N, 4 * N}) {
    est.n.push_back(m);
    est.sequence.push_back(gn_statistic(z, b, omega, m) / static_cast<double>(m));
  }
  est.value = est.sequence.front();
  const auto [lo, hi] = std::minmax_element(est.sequence.begin(), est.sequence.end());
  est.spread = *hi - *lo;
  return est;
}

double sinc_squared(double omega) {
  if (omega == 0.0) return 1.0;
  const double x = std::numbers::pi * omega;
  const double s = std::sin(x) / x;
  return s * s;
}

DensityGrid suspension_conversion(const DensityGrid& sigma) {
  if (!sigma.is_scalar()) throw PreconditionError("suspension conversion expects a scalar density");
  DensityGrid out = sigma;
  for (std::size_t i = 0; i < out.scalar.size(); ++i) out.scalar[i] *= sinc_squared(out.grid.omega(i));
  return out;
}

namespace {

// Fixed-point word long enough to tile [0, R].
Word covering_prefix(const Substitution& z, const SuspensionParams& s, long double R) {
  const long double smin = s.heights.minCoeff();
  const auto n = static_cast<std::size_t>(std::ceil(R / smin)) + 2;
  const auto seed = default_fixed_point(z);
  return fixed_point_prefix(z, seed.letter, n);
}

}  // namespace

DiffractionResult diffraction_autocorrelation(const Substitution& z, const SuspensionParams& s, Letter a, double R,
                                              const FrequencyGrid& grid, double max_distance, int threads) {
  if (!(R > 0)) throw PreconditionError("window must be positive");
  if (R > 1e6 * static_cast<double>(s.heights.minCoeff())) throw PreconditionError("window exceeds 1e6 tiles");
  const Word u = covering_prefix(z, s, R);
  const int d = z.size();
  std::vector<long double> pos;
  std::vector<IntVector> pop;  // population vector of the prefix before each point
  IntVector running = IntVector::Zero(d);
  long double x = 0;
  std::size_t tiles = 0;
  for (Letter c : u) {
    if (x > R) break;
    ++tiles;
    if (c == a) {
      pos.push_back(x);
      pop.push_back(running);
    }
    x += s.heights(c);
    ++running(c);
  }
  if (tiles < 10) throw PreconditionError("window too small: fewer than 10 tiles");
  if (pos.empty()) throw PreconditionError("symbol does not occur in the window");
  if (max_distance <= 0) max_distance = 10.0 * static_cast<double>(s.heights.maxCoeff());

  DiffractionResult res;
  res.points = pos.size();
  res.mass_at_zero = static_cast<double>(pos.size()) / R;
  // Distances are grouped exactly through population-vector differences.
  std::map<std::vector<std::int64_t>, std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = i + 1; j < pos.size() && pos[j] - pos[i] <= max_distance; ++j) {
      const IntVector diff = pop[j] - pop[i];
      auto& slot = dist[std::vector<std::int64_t>(diff.data(), diff.data() + d)];
      slot.first = static_cast<double>(pos[j] - pos[i]);
      ++slot.second;
    }
  res.autocorrelation.push_back({0.0, res.mass_at_zero});
  std::vector<std::pair<double, double>> rest;
  for (const auto& [key, v] : dist) rest.push_back({v.first, static_cast<double>(v.second) / R});
  std::sort(rest.begin(), rest.end());
  res.autocorrelation.insert(res.autocorrelation.end(), rest.begin(), rest.end());

  res.diffraction.grid = grid;
  res.diffraction.label = "window R=" + std::to_string(R);
  res.diffraction.scalar.assign(grid.points, 0.0);
  parallel_for(grid.points, threads, [&](std::size_t i) {
    const long double w = grid.omega(i);
    std::complex<double> acc = 0;
    for (long double p : pos) acc += Phase::from_real(w * p).character();
    res.diffraction.scalar[i] = std::norm(acc) / R;
  });
  return res;
}

double partition_identity_check(const Substitution& z, const FrequencyGrid& grid) {
  const auto signs = two_letter_signs(z);
  const int q = static_cast<int>(signs.size());
  double dev = 0;
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double w = grid.omega(i);
    double acc = 0;
    for (int j = 0; j < q; ++j) acc += two_letter_polynomial(signs, (w + j) / q);
    dev = std::max(dev, std::abs(acc - q));
  }
  return dev;
}

std::complex<double> flow_twisted_integral(const Substitution& z, const SuspensionParams& s, const TestFunction& f,
                                           long double omega, long double R) {
  if (f.kind == TestFunction::Kind::LevelIndicator && f.level > 0)
    throw PreconditionError("flow integral supports simple cylindrical functions only");
  if (static_cast<int>(f.b.size()) != z.size()) throw InputError("test function weights do not match the alphabet");
  if (!(R >= 0)) throw PreconditionError("R must be non-negative");
  const Word u = covering_prefix(z, s, R);
  std::complex<double> acc = 0;
  long double x = 0;
  for (Letter c : u) {
    if (x >= R) break;
    const long double len = std::min(s.heights(c), R - x);
    if (f.b[c] != 0.0) acc += f.b[c] * Phase::from_real(omega * x).character() * segment_transform(omega, len);
    x += s.heights(c);
  }
  return acc;
}

}  // namespace subspec
