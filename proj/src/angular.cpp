#include "starspec/angular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include <boost/multiprecision/cpp_int.hpp>

#include "starspec/errors.hpp"

namespace starspec::angular {

namespace mp = boost::multiprecision;

namespace {

constexpr int kMaxFactorial = 256;

const std::vector<mp::cpp_int>& factorials() {
  static const std::vector<mp::cpp_int> table = [] {
    std::vector<mp::cpp_int> f(kMaxFactorial + 1);
    f[0] = 1;
    for (int i = 1; i <= kMaxFactorial; ++i) f[i] = f[i - 1] * i;
    return f;
  }();
  return table;
}

const mp::cpp_int& fact(int n) {
  if (n < 0 || n > kMaxFactorial) throw InvalidArgument("factorial argument out of range");
  return factorials()[n];
}

// Product (lo+1)(lo+2)...(hi), i.e. hi!/lo!.
mp::cpp_int rising(int lo, int hi) {
  mp::cpp_int p = 1;
  for (int t = lo + 1; t <= hi; ++t) p *= t;
  return p;
}

int to_int_half(double x) {
  const double twice = 2.0 * x;
  const double r = std::round(twice);
  if (std::abs(twice - r) > 1e-9) throw InvalidArgument("quantum number is not a half-integer");
  return static_cast<int>(r);
}

bool valid_pair(int tj, int tm) { return tj >= 0 && std::abs(tm) <= tj && ((tj + tm) & 1) == 0; }

// sign * sqrt(num / den) with a correctly scaled long double quotient.
double signed_sqrt_ratio(int sign, const mp::cpp_int& num, const mp::cpp_int& den) {
  if (num == 0) return 0.0;
  const long shift = 120 - (static_cast<long>(mp::msb(num)) - static_cast<long>(mp::msb(den)));
  mp::cpp_int q = shift >= 0 ? mp::cpp_int((num << shift) / den) : mp::cpp_int(num / (den << -shift));
  const long double ratio = std::ldexp(q.convert_to<long double>(), static_cast<int>(-shift));
  return static_cast<double>(sign * std::sqrt(ratio));
}

}  // namespace

double wigner3j_2(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) {
  if (!valid_pair(tj1, tm1) || !valid_pair(tj2, tm2) || !valid_pair(tj3, tm3)) return 0.0;
  if (tm1 + tm2 + tm3 != 0) return 0.0;
  if (tj3 < std::abs(tj1 - tj2) || tj3 > tj1 + tj2) return 0.0;
  if (((tj1 + tj2 + tj3) & 1) != 0) return 0.0;

  const int a = (tj1 + tj2 - tj3) / 2;
  const int b = (tj1 - tj2 + tj3) / 2;
  const int c = (-tj1 + tj2 + tj3) / 2;
  const int big = (tj1 + tj2 + tj3) / 2 + 1;

  // denominators of the Racah sum: x_i(k) = base_i + dir_i * k
  const std::array<int, 6> base = {0, (tj3 - tj2 + tm1) / 2, (tj3 - tj1 - tm2) / 2, a, (tj1 - tm1) / 2,
                                   (tj2 + tm2) / 2};
  const std::array<int, 6> dir = {1, 1, 1, -1, -1, -1};
  const int kmin = std::max({0, -base[1], -base[2]});
  const int kmax = std::min({base[3], base[4], base[5]});
  if (kmin > kmax) return 0.0;

  std::array<int, 6> top{};
  for (int i = 0; i < 6; ++i) top[i] = base[i] + dir[i] * (dir[i] > 0 ? kmax : kmin);

  mp::cpp_int sum = 0;
  for (int k = kmin; k <= kmax; ++k) {
    mp::cpp_int term = 1;
    for (int i = 0; i < 6; ++i) term *= rising(base[i] + dir[i] * k, top[i]);
    if (k & 1) {
      sum -= term;
    } else {
      sum += term;
    }
  }
  if (sum == 0) return 0.0;

  mp::cpp_int denom_sum = 1;
  for (int i = 0; i < 6; ++i) denom_sum *= fact(top[i]);

  mp::cpp_int num = fact(a) * fact(b) * fact(c);
  num *= fact((tj1 + tm1) / 2) * fact((tj1 - tm1) / 2);
  num *= fact((tj2 + tm2) / 2) * fact((tj2 - tm2) / 2);
  num *= fact((tj3 + tm3) / 2) * fact((tj3 - tm3) / 2);
  num *= sum * sum;
  mp::cpp_int den = fact(big) * denom_sum * denom_sum;

  const int phase_exp = (tj1 - tj2 - tm3) / 2;
  int sign = (phase_exp % 2 == 0) ? 1 : -1;
  if (sum < 0) sign = -sign;
  return signed_sqrt_ratio(sign, num, den);
}

double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3) {
  return wigner3j_2(to_int_half(j1), to_int_half(j2), to_int_half(j3), to_int_half(m1), to_int_half(m2),
                    to_int_half(m3));
}

double clebsch_gordan_2(int tj1, int tm1, int tj2, int tm2, int tj3, int tm3) {
  if (tm1 + tm2 != tm3) return 0.0;
  const double w = wigner3j_2(tj1, tj2, tj3, tm1, tm2, -tm3);
  if (w == 0.0) return 0.0;
  const int phase_exp = (tj1 - tj2 + tm3) / 2;
  const double sign = (phase_exp % 2 == 0) ? 1.0 : -1.0;
  return sign * std::sqrt(static_cast<double>(tj3 + 1)) * w;
}

double clebsch_gordan(double j1, double m1, double j2, double m2, double j3, double m3) {
  return clebsch_gordan_2(to_int_half(j1), to_int_half(m1), to_int_half(j2), to_int_half(m2), to_int_half(j3),
                          to_int_half(m3));
}

double gaunt(int l1, int m1, int l2, int m2, int l3, int m3) {
  if (m3 != m1 + m2) return 0.0;
  if (((l1 + l2 + l3) & 1) != 0) return 0.0;
  const double w0 = wigner3j_2(2 * l1, 2 * l2, 2 * l3, 0, 0, 0);
  if (w0 == 0.0) return 0.0;
  const double wm = wigner3j_2(2 * l1, 2 * l2, 2 * l3, 2 * m1, 2 * m2, -2 * m3);
  const double pref = std::sqrt((2.0 * l1 + 1) * (2.0 * l2 + 1) * (2.0 * l3 + 1) / (4.0 * std::numbers::pi));
  return ((m3 & 1) ? -1.0 : 1.0) * pref * w0 * wm;
}

double wigner_small_d_2(int tj, int tmp, int tm, double beta) {
  if (!valid_pair(tj, tmp) || !valid_pair(tj, tm)) return 0.0;
  static const std::array<long double, 64> lfact = [] {
    std::array<long double, 64> f{};
    f[0] = 1.0L;
    for (int i = 1; i < 64; ++i) f[i] = f[i - 1] * i;
    return f;
  }();
  const int jpmp = (tj + tmp) / 2, jmmp = (tj - tmp) / 2;
  const int jpm = (tj + tm) / 2, jmm = (tj - tm) / 2;
  if (std::max({jpmp, jmmp, jpm, jmm}) >= 64) throw InvalidArgument("spin too large for small-d evaluation");
  const int dm = (tmp - tm) / 2;  // m' - m
  const long double c = std::cos(0.5L * beta);
  const long double s = std::sin(0.5L * beta);
  const long double pref = std::sqrt(lfact[jpmp] * lfact[jmmp] * lfact[jpm] * lfact[jmm]);
  const int smin = std::max(0, -dm);
  const int smax = std::min(jpm, jmmp);
  long double sum = 0.0L;
  for (int k = smin; k <= smax; ++k) {
    const long double denom = lfact[jpm - k] * lfact[k] * lfact[dm + k] * lfact[jmmp - k];
    const int pc = tj - dm - 2 * k;
    const int ps = dm + 2 * k;
    long double term = std::pow(c, pc) * std::pow(s, ps) / denom;
    if ((dm + k) & 1) term = -term;
    sum += term;
  }
  return static_cast<double>(pref * sum);
}

namespace {

// Normalized associated Legendre values Pbar_l^m(cos theta) for l = m..lmax,
// including the Condon-Shortley phase and the 1/sqrt(4 pi) factor.
void legendre_column(int m, int lmax, double ct, double pmm, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(lmax + 1), 0.0);
  out[m] = pmm;
  if (m + 1 > lmax) return;
  out[m + 1] = std::sqrt(2.0 * m + 3.0) * ct * pmm;
  for (int l = m + 2; l <= lmax; ++l) {
    const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
    const double b = std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) /
                               (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
    out[l] = a * (ct * out[l - 1] - b * out[l - 2]);
  }
}

}  // namespace

std::vector<std::complex<double>> spherical_harmonics_upto(int lmax, double theta, double phi) {
  if (lmax < 0) throw InvalidArgument("lmax must be non-negative");
  const auto side = static_cast<std::size_t>(lmax + 1);
  std::vector<std::complex<double>> out(side * side);
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  std::vector<double> col;
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st;
    legendre_column(m, lmax, ct, pmm, col);
    const std::complex<double> e = std::polar(1.0, m * phi);
    const double neg_sign = (m & 1) ? -1.0 : 1.0;
    for (int l = m; l <= lmax; ++l) {
      const std::complex<double> y = col[l] * e;
      out[static_cast<std::size_t>(l * l + l + m)] = y;
      if (m > 0) out[static_cast<std::size_t>(l * l + l - m)] = neg_sign * std::conj(y);
    }
  }
  return out;
}

std::complex<double> spherical_harmonic(int l, int m, double theta, double phi) {
  if (l < 0 || std::abs(m) > l) throw InvalidArgument("invalid spherical harmonic indices");
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const int am = std::abs(m);
  double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int k = 1; k <= am; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * st;
  std::vector<double> col;
  legendre_column(am, l, ct, pmm, col);
  const std::complex<double> y = col[l] * std::polar(1.0, am * phi);
  if (m >= 0) return y;
  return ((am & 1) ? -1.0 : 1.0) * std::conj(y);
}

ThreeJTable::ThreeJTable(int two_jmax) : two_jmax_(two_jmax) {
  if (two_jmax < 0 || two_jmax > 100) throw InvalidArgument("3j table range out of bounds");
  for (int tj1 = 0; tj1 <= two_jmax; ++tj1) {
    for (int tj2 = 0; tj2 <= two_jmax; ++tj2) {
      for (int tj3 = std::abs(tj1 - tj2); tj3 <= tj1 + tj2; tj3 += 2) {
        for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2) {
          for (int tm2 = -tj2; tm2 <= tj2; tm2 += 2) {
            const int tm3 = -tm1 - tm2;
            if (std::abs(tm3) > tj3) continue;
            table_.emplace(key(tj1, tj2, tj3, tm1, tm2), wigner3j_2(tj1, tj2, tj3, tm1, tm2, tm3));
          }
        }
      }
    }
  }
}

std::uint64_t ThreeJTable::key(int tj1, int tj2, int tj3, int tm1, int tm2) {
  auto u = [](int x) { return static_cast<std::uint64_t>(x + 512) & 0x3ffu; };
  return u(tj1) | (u(tj2) << 10) | (u(tj3) << 20) | (u(tm1) << 30) | (u(tm2) << 40);
}

double ThreeJTable::operator()(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) const {
  if (tj1 <= two_jmax_ && tj2 <= two_jmax_ && tm1 + tm2 + tm3 == 0) {
    auto it = table_.find(key(tj1, tj2, tj3, tm1, tm2));
    if (it != table_.end()) return it->second;
    // absent keys inside the range are symbols that vanish by selection rules
    if (valid_pair(tj1, tm1) && valid_pair(tj2, tm2)) return 0.0;
  }
  return wigner3j_2(tj1, tj2, tj3, tm1, tm2, tm3);
}

}  // namespace starspec::angular
