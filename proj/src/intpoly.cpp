#include "subspec/intpoly.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "subspec/errors.hpp"

namespace subspec {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw NumericalError("integer overflow in exact addition");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw NumericalError("integer overflow in exact multiplication");
  return r;
}

namespace {

std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw NumericalError("integer overflow in exact arithmetic");
  return static_cast<std::int64_t>(v);
}

}  // namespace

IntMatrix checked_multiply(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix r(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      __int128 acc = 0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) {
        acc += static_cast<__int128>(a(i, k)) * b(k, j);
        narrow(acc);
      }
      r(i, j) = narrow(acc);
    }
  return r;
}

IntMatrix checked_power(const IntMatrix& a, int n) {
  IntMatrix r = IntMatrix::Identity(a.rows(), a.cols());
  for (int i = 0; i < n; ++i) r = checked_multiply(r, a);
  return r;
}

IntPoly::IntPoly(std::vector<std::int64_t> coeffs) : c_(std::move(coeffs)) { trim(); }

IntPoly IntPoly::monomial(int degree, std::int64_t coeff) {
  std::vector<std::int64_t> c(degree + 1, 0);
  c[degree] = coeff;
  return IntPoly(std::move(c));
}

void IntPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

IntPoly IntPoly::operator+(const IntPoly& o) const {
  std::vector<std::int64_t> r(std::max(c_.size(), o.c_.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = checked_add((*this)[i], o[i]);
  return IntPoly(std::move(r));
}

IntPoly IntPoly::operator-(const IntPoly& o) const {
  std::vector<std::int64_t> r(std::max(c_.size(), o.c_.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = narrow(static_cast<__int128>((*this)[i]) - o[i]);
  return IntPoly(std::move(r));
}

IntPoly IntPoly::operator*(const IntPoly& o) const {
  if (is_zero() || o.is_zero()) return {};
  std::vector<std::int64_t> r(c_.size() + o.c_.size() - 1, 0);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] = checked_add(r[i + j], checked_mul(c_[i], o.c_[j]));
  return IntPoly(std::move(r));
}

std::optional<IntPoly> IntPoly::exact_divide(const IntPoly& divisor) const {
  if (divisor.is_zero()) return std::nullopt;
  if (is_zero()) return IntPoly{};
  if (degree() < divisor.degree()) return std::nullopt;
  std::vector<__int128> rem(c_.begin(), c_.end());
  const int dd = divisor.degree();
  const std::int64_t lead = divisor.leading();
  std::vector<std::int64_t> quot(degree() - dd + 1, 0);
  for (int i = degree() - dd; i >= 0; --i) {
    const __int128 top = rem[i + dd];
    if (top % lead != 0) return std::nullopt;
    const std::int64_t qc = narrow(top / lead);
    quot[i] = qc;
    for (int j = 0; j <= dd; ++j) {
      rem[i + j] -= static_cast<__int128>(qc) * divisor.c_[j];
      narrow(rem[i + j]);
    }
  }
  for (__int128 r : rem)
    if (r != 0) return std::nullopt;
  return IntPoly(std::move(quot));
}

std::complex<long double> IntPoly::eval(std::complex<long double> x) const {
  std::complex<long double> acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + static_cast<long double>(*it);
  return acc;
}

long double IntPoly::eval(long double x) const {
  long double acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + static_cast<long double>(*it);
  return acc;
}

namespace {

IntPoly derivative(const IntPoly& p) {
  std::vector<std::int64_t> r;
  for (int i = 1; i <= p.degree(); ++i) r.push_back(checked_mul(p[i], i));
  return IntPoly(std::move(r));
}

}  // namespace

std::vector<std::complex<double>> IntPoly::roots() const {
  std::vector<std::complex<double>> out;
  if (degree() < 1) return out;
  // Exact zero roots first; they would otherwise come back as tiny noise.
  int shift = 0;
  while (c_[shift] == 0) ++shift;
  out.assign(shift, {0.0, 0.0});
  std::vector<std::int64_t> rest(c_.begin() + shift, c_.end());
  const int n = static_cast<int>(rest.size()) - 1;
  if (n == 0) return out;
  const IntPoly q(rest);
  const IntPoly dq = derivative(q);

  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  const double lead = static_cast<double>(rest.back());
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -static_cast<double>(rest[i]) / lead;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  const auto ev = es.eigenvalues();
  for (int i = 0; i < n; ++i) {
    std::complex<long double> z(ev[i].real(), ev[i].imag());
    long double best = std::abs(q.eval(z));
    for (int it = 0; it < 30 && best > 0; ++it) {
      const auto d = dq.eval(z);
      if (std::abs(d) == 0) break;
      const auto cand = z - q.eval(z) / d;
      const long double v = std::abs(q.eval(cand));
      if (!(v < best)) break;
      z = cand;
      best = v;
    }
    // Keep real roots real.
    if (std::abs(z.imag()) < 1e-14L * std::max(1.0L, std::abs(z))) z.imag(0);
    out.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return out;
}

std::string IntPoly::to_string() const {
  if (is_zero()) return "0";
  std::string s;
  for (int i = degree(); i >= 0; --i) {
    const std::int64_t c = c_[i];
    if (c == 0) continue;
    const std::int64_t a = c < 0 ? -c : c;
    if (s.empty())
      s += c < 0 ? "-" : "";
    else
      s += c < 0 ? " - " : " + ";
    if (a != 1 || i == 0) s += std::to_string(a);
    if (i >= 1) s += "x";
    if (i >= 2) s += "^" + std::to_string(i);
  }
  return s;
}

IntPoly characteristic_polynomial(const IntMatrix& a) {
  // Faddeev-LeVerrier: every division below is exact over Z.
  const int n = static_cast<int>(a.rows());
  std::vector<std::int64_t> c(n + 1, 0);
  c[n] = 1;
  IntMatrix m = IntMatrix::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    m = checked_multiply(a, m);
    for (int i = 0; i < n; ++i) m(i, i) = checked_add(m(i, i), c[n - k + 1]);
    const IntMatrix am = checked_multiply(a, m);
    __int128 tr = 0;
    for (int i = 0; i < n; ++i) tr += am(i, i);
    if (tr % k != 0) throw NumericalError("characteristic polynomial: inexact trace division");
    c[n - k] = narrow(-tr / k);
  }
  return IntPoly(std::move(c));
}

int euler_phi(int n) {
  int r = n;
  for (int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      r -= r / p;
    }
  if (n > 1) r -= r / n;
  return r;
}

namespace {

// Phi_1..Phi_n, each obtained from x^m - 1 by dividing out the earlier ones.
std::vector<IntPoly> cyclotomic_table(int n) {
  std::vector<IntPoly> t(n + 1);
  for (int m = 1; m <= n; ++m) {
    IntPoly p = IntPoly::monomial(m) - IntPoly::monomial(0);
    for (int d = 1; d < m; ++d)
      if (m % d == 0) p = *p.exact_divide(t[d]);
    t[m] = p;
  }
  return t;
}

}  // namespace

IntPoly cyclotomic(int n) { return cyclotomic_table(n)[n]; }

std::vector<int> cyclotomic_factor_orders(const IntPoly& p) {
  std::vector<int> out;
  const int deg = p.degree();
  if (deg < 1) return out;
  // phi(n) >= sqrt(n/2), so n <= 2 deg^2 covers every order with phi(n) <= deg.
  const int top = 2 * deg * deg + 2;
  const auto table = cyclotomic_table(top);
  for (int n = 1; n <= top; ++n)
    if (euler_phi(n) <= deg && p.divisible_by(table[n])) out.push_back(n);
  return out;
}

namespace {

// Product of (x - r) over the chosen roots, rounded to Z when the rounding is
// unambiguous.
std::optional<IntPoly> rounded_product(const std::vector<std::complex<double>>& roots,
                                       const std::vector<int>& pick) {
  std::vector<std::complex<long double>> c{1.0L};
  for (int idx : pick) {
    const std::complex<long double> r(roots[idx].real(), roots[idx].imag());
    std::vector<std::complex<long double>> next(c.size() + 1, 0.0L);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= c[i] * r;
    }
    c = std::move(next);
  }
  std::vector<std::int64_t> ic;
  for (const auto& z : c) {
    const long double re = std::round(z.real());
    const long double tol = 1e-4L * std::max(1.0L, std::abs(z.real()));
    if (std::abs(z.imag()) > tol || std::abs(z.real() - re) > tol) return std::nullopt;
    if (std::abs(re) > 9.0e18L) return std::nullopt;
    ic.push_back(static_cast<std::int64_t>(re));
  }
  return IntPoly(std::move(ic));
}

// Smallest-degree proper monic factor, if one exists.
std::optional<IntPoly> find_factor(const IntPoly& p) {
  const int n = p.degree();
  // integer roots (monic, so rational roots are integers dividing p(0))
  for (const auto& r : p.roots()) {
    if (std::abs(r.imag()) > 1e-6) continue;
    const long double cand = std::round(static_cast<long double>(r.real()));
    if (std::abs(cand) > 4.0e18L) continue;
    const IntPoly lin({-static_cast<std::int64_t>(cand), 1});
    if (p.divisible_by(lin)) return lin;
  }
  const auto roots = p.roots();
  for (int k = 2; k <= n / 2; ++k) {
    std::vector<int> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      if (auto f = rounded_product(roots, pick); f && f->degree() == k && p.divisible_by(*f)) return f;
      int i = k - 1;
      while (i >= 0 && pick[i] == n - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return std::nullopt;
}

}  // namespace

Factorization factor_monic(const IntPoly& p, int max_degree) {
  Factorization out;
  if (p.degree() < 1) return out;
  if (p.leading() != 1) throw PreconditionError("factor_monic: polynomial is not monic");
  std::vector<IntPoly> work{p};
  while (!work.empty()) {
    IntPoly cur = work.back();
    work.pop_back();
    if (cur.degree() <= 1) {
      out.factors.push_back(cur);
      continue;
    }
    if (cur.degree() > max_degree) {
      out.complete = false;
      out.factors.push_back(cur);
      continue;
    }
    if (auto f = find_factor(cur)) {
      work.push_back(*cur.exact_divide(*f));
      work.push_back(*f);
    } else {
      out.factors.push_back(cur);
    }
  }
  std::stable_sort(out.factors.begin(), out.factors.end(), [](const IntPoly& a, const IntPoly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a.coeffs() < b.coeffs();
  });
  return out;
}

}  // namespace subspec
