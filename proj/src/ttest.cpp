#include <cmath>
#include <limits>

#include "ppui/evalstat.hpp"

namespace ppui {

namespace {

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw ConfigError("student_t_cdf: df must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t > 0 ? 1.0 - tail : tail;
}

std::string_view to_string(TTestKind k) {
  switch (k) {
    case TTestKind::paired: return "paired";
    case TTestKind::pooled: return "independent-pooled";
    case TTestKind::welch: return "independent-welch";
  }
  return "?";
}

TTestResult t_test(const std::vector<double>& a, const std::vector<double>& b, TTestKind kind) {
  if (a.size() < 2 || b.size() < 2) throw ConfigError("t-test needs at least 2 values per sample");
  TTestResult r;
  r.kind = kind;
  r.n_a = a.size();
  r.n_b = b.size();
  r.mean_a = mean(a);
  r.mean_b = mean(b);
  r.sd_a = sample_sd(a);
  r.sd_b = sample_sd(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());

  switch (kind) {
    case TTestKind::paired: {
      if (a.size() != b.size()) throw ConfigError("paired t-test needs equal lengths");
      std::vector<double> d(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
      const double sd = sample_sd(d);
      if (sd == 0.0) throw ConfigError("paired t-test undefined: differences have zero variance");
      r.t = mean(d) / (sd / std::sqrt(na));
      r.df = na - 1.0;
      break;
    }
    case TTestKind::pooled: {
      const double pooled = ((na - 1.0) * r.sd_a * r.sd_a + (nb - 1.0) * r.sd_b * r.sd_b) / (na + nb - 2.0);
      if (pooled == 0.0) throw ConfigError("pooled t-test undefined: both samples have zero variance");
      r.t = (r.mean_a - r.mean_b) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
      r.df = na + nb - 2.0;
      break;
    }
    case TTestKind::welch: {
      const double va = r.sd_a * r.sd_a / na, vb = r.sd_b * r.sd_b / nb;
      if (va + vb == 0.0) throw ConfigError("Welch t-test undefined: both samples have zero variance");
      r.t = (r.mean_a - r.mean_b) / std::sqrt(va + vb);
      r.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
      break;
    }
  }
  r.p = std::min(1.0, 2.0 * student_t_cdf(-std::fabs(r.t), r.df));
  return r;
}

}  // namespace ppui
