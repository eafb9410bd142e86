#include "newsgame/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "newsgame/io.hpp"

namespace newsgame {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 500;

// Series expansion of P(a,x), effective for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x) (modified Lentz), effective for x >= a+1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
  const double tiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

// Shared OLS core; throws on fewer than 3 points or a degenerate x.
struct Fit {
  double slope, intercept, se, t, r2;
};
Fit ols(const std::vector<double>& x, const std::vector<double>& y,
        const char* who) {
  size_t n = x.size();
  if (n < 3)
    throw std::invalid_argument(std::string(who) + ": need at least 3 points");
  double xb = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
  double yb = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xb) * (x[i] - xb);
    sxy += (x[i] - xb) * (y[i] - yb);
    syy += (y[i] - yb) * (y[i] - yb);
  }
  if (!(sxx > 0))
    throw std::invalid_argument(std::string(who) +
                                ": regressor has zero variance");
  Fit f;
  f.slope = sxy / sxx;
  f.intercept = yb - f.slope * xb;
  double ssr = 0;
  for (size_t i = 0; i < n; ++i) {
    double e = y[i] - f.intercept - f.slope * x[i];
    ssr += e * e;
  }
  if (ssr < 0) ssr = 0;
  f.se = std::sqrt(ssr / double(n - 2) / sxx);
  // se == 0 (exact fit): t runs off to +-inf and p collapses to 0/1; a flat
  // exact fit keeps t = 0 (p = 0.5) rather than 0/0
  f.t = f.se > 0 ? f.slope / f.se
                 : (f.slope > 0 ? std::numeric_limits<double>::infinity()
                    : f.slope < 0 ? -std::numeric_limits<double>::infinity()
                                  : 0.0);
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 0.0;
  return f;
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0) || !(x >= 0) || std::isnan(a) || std::isnan(x))
    throw std::invalid_argument("gamma_p: need a > 0, x >= 0");
  if (x == 0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0) || !(x >= 0) || std::isnan(a) || std::isnan(x))
    throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
  if (x == 0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double betainc(double a, double b, double x) {
  if (!(a > 0) || !(b > 0) || std::isnan(x))
    throw std::invalid_argument("betainc: need a, b > 0");
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double chi2_sf(double x, double df) {
  if (!(x >= 0) || !(df >= 1))
    throw std::invalid_argument("chi2_sf: need x >= 0, df >= 1");
  return gamma_q(df / 2.0, x / 2.0);
}

double t_sf(double t, double df) {
  if (!(df >= 1)) throw std::invalid_argument("t_sf: need df >= 1");
  if (std::isnan(t)) throw std::invalid_argument("t_sf: t is NaN");
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  double ib = 0.5 * betainc(df / 2.0, 0.5, df / (df + t * t));
  return t >= 0 ? ib : 1.0 - ib;
}

double binom_sf(long long k, long long n, double p) {
  if (n < 0 || !(p >= 0 && p <= 1))
    throw std::invalid_argument("binom_sf: need n >= 0, p in [0,1]");
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (p == 0) return 0.0;
  if (p == 1) return 1.0;
  // P(X >= k) = I_p(k, n-k+1)
  return betainc(double(k), double(n - k + 1), p);
}

FisherResult fisher_combined(const std::vector<double>& pvals) {
  if (pvals.empty())
    throw std::invalid_argument("fisher_combined: no p-values");
  FisherResult out;
  out.k = int(pvals.size());
  double sum = 0;
  for (double p : pvals) {
    if (!(p > 0 && p <= 1))
      throw std::invalid_argument("fisher_combined: p-values must lie in (0,1]");
    sum += std::log(p);
  }
  out.statistic = -2.0 * sum;
  out.df = 2.0 * out.k;
  out.p = chi2_sf(out.statistic, out.df);
  return out;
}

MetaResult dersimonian_laird(const std::vector<double>& effects,
                             const std::vector<double>& variances) {
  size_t k = effects.size();
  if (k < 2 || variances.size() != k)
    throw std::invalid_argument(
        "dersimonian_laird: need k >= 2 effects with matching variances");
  for (double v : variances)
    if (!(v > 0))
      throw std::invalid_argument("dersimonian_laird: variances must be > 0");

  double w_sum = 0, wy_sum = 0, w2_sum = 0;
  for (size_t i = 0; i < k; ++i) {
    double w = 1.0 / variances[i];
    w_sum += w;
    wy_sum += w * effects[i];
    w2_sum += w * w;
  }
  double y_fixed = wy_sum / w_sum;

  MetaResult out;
  out.k = int(k);
  out.q = 0;
  for (size_t i = 0; i < k; ++i) {
    double w = 1.0 / variances[i];
    out.q += w * (effects[i] - y_fixed) * (effects[i] - y_fixed);
  }
  double denom = w_sum - w2_sum / w_sum;
  out.tau2 = denom > 0 ? std::max(0.0, (out.q - double(k - 1)) / denom) : 0.0;
  out.i2 = out.q > 0 ? std::max(0.0, (out.q - double(k - 1)) / out.q) : 0.0;

  double ws_sum = 0, wsy_sum = 0;
  for (size_t i = 0; i < k; ++i) {
    double ws = 1.0 / (variances[i] + out.tau2);
    ws_sum += ws;
    wsy_sum += ws * effects[i];
  }
  out.mu = wsy_sum / ws_sum;
  out.se = 1.0 / std::sqrt(ws_sum);
  out.p_mu = 2.0 * normal_sf(std::fabs(out.mu) / out.se);
  out.p_q = chi2_sf(out.q, double(k - 1));
  return out;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t(0));
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double r = (double(i + 1) + double(j + 1)) / 2.0;  // 1-based mean rank
    for (size_t m = i; m <= j; ++m) ranks[order[m]] = r;
    i = j + 1;
  }
  return ranks;
}

Regression site_regression(const std::vector<double>& accuracy,
                           const std::vector<double>& engagement, Transform tf,
                           Tail tail, bool log1p) {
  if (accuracy.size() != engagement.size())
    throw std::invalid_argument("site_regression: length mismatch");

  Regression out;
  std::vector<double> x, y;
  if (tf == Transform::Rank) {
    x = average_ranks(accuracy);
    y = average_ranks(engagement);
    out.n_used = (long long)x.size();
  } else {
    for (size_t i = 0; i < accuracy.size(); ++i) {
      double e = engagement[i];
      if (log1p ? !(e >= 0) : !(e > 0)) {
        ++out.n_dropped;  // log of a nonpositive engagement is undefined
        continue;
      }
      x.push_back(accuracy[i]);
      y.push_back(std::log10(log1p ? 1.0 + e : e));
    }
    out.n_used = (long long)x.size();
    if (tf == Transform::Standardized) {
      for (std::vector<double>* v : {&x, &y}) {
        size_t n = v->size();
        if (n < 3) break;  // ols below reports the count error
        double mean = std::accumulate(v->begin(), v->end(), 0.0) / double(n);
        double ss = 0;
        for (double t : *v) ss += (t - mean) * (t - mean);
        double sd = std::sqrt(ss / double(n - 1));
        if (!(sd > 0))
          throw std::invalid_argument(
              "site_regression: zero variance after standardization");
        for (double& t : *v) t = (t - mean) / sd;
      }
    }
  }

  Fit f = ols(x, y, "site_regression");
  out.slope = f.slope;
  out.intercept = f.intercept;
  out.stderr_slope = f.se;
  out.t = f.t;
  out.r2 = f.r2;
  double df = double(out.n_used - 2);
  out.p_two_tailed = 2.0 * t_sf(std::fabs(f.t), df);
  out.p_one_tailed = tail == Tail::Positive ? t_sf(f.t, df) : t_sf(-f.t, df);
  return out;
}

TrustRegression trust_regression(const std::vector<double>& site_slopes,
                                 const std::vector<double>& trust) {
  if (site_slopes.size() != trust.size())
    throw std::invalid_argument("trust_regression: length mismatch");
  Fit f = ols(trust, site_slopes, "trust_regression");
  TrustRegression out;
  out.slope = f.slope;
  out.intercept = f.intercept;
  out.r2 = f.r2;
  out.n = int(site_slopes.size());
  out.p_two_tailed = 2.0 * t_sf(std::fabs(f.t), double(out.n - 2));
  return out;
}

namespace {

// Full-string double parse; rejects empty fields and trailing junk.
bool parse_num(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  if (std::isnan(v)) return false;
  *out = v;
  return true;
}

}  // namespace

Dataset ingest_csv(const std::string& path) {
  std::string text = read_file(path);

  // our own emitters prepend "# config_hash=..." comment lines
  size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    size_t nl = text.find('\n', pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
  }
  std::vector<std::vector<std::string>> rows = parse_csv(text.substr(pos));
  if (rows.empty()) throw std::runtime_error(path + ": no header row");

  static const char* kColumns[] = {"site_id",       "site_class", "headline",
                                   "accuracy_mean", "engagement", "published"};
  int col[6];
  const std::vector<std::string>& header = rows[0];
  for (int c = 0; c < 6; ++c) {
    col[c] = -1;
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == kColumns[c]) col[c] = int(i);
    if (col[c] < 0)
      throw std::runtime_error(path + ": header lacks column " +
                               std::string(kColumns[c]));
  }

  Dataset out;
  for (size_t rix = 1; rix < rows.size(); ++rix) {
    const std::vector<std::string>& row = rows[rix];
    auto skip = [&](const std::string& why) {
      ++out.skipped_rows;
      out.diagnostics.push_back("row " + std::to_string(rix + 1) + ": " + why);
    };
    if (row.size() != header.size()) {
      skip("expected " + std::to_string(header.size()) + " fields, got " +
           std::to_string(row.size()));
      continue;
    }
    Article a;
    a.site_id = row[size_t(col[0])];
    const std::string& cls = row[size_t(col[1])];
    if (cls == "mainstream") {
      a.site_class = SiteClass::Mainstream;
    } else if (cls == "fake") {
      a.site_class = SiteClass::Fake;
    } else {
      skip("unknown site_class '" + cls + "'");
      continue;
    }
    a.headline = row[size_t(col[2])];
    if (!parse_num(row[size_t(col[3])], &a.accuracy)) {
      skip("missing or malformed accuracy_mean");
      continue;
    }
    if (a.accuracy < 1 || a.accuracy > 7) {
      skip("accuracy_mean outside the 1..7 scale");
      continue;
    }
    if (!parse_num(row[size_t(col[4])], &a.engagement) || a.engagement < 0) {
      skip("missing or malformed engagement");
      continue;
    }
    a.published = row[size_t(col[5])];
    out.articles.push_back(std::move(a));
  }
  return out;
}

}  // namespace newsgame
