#pragma once
#include <string>
#include <vector>

namespace newsgame {

// --- special functions (native implementations, double precision) ---

double gamma_p(double a, double x);  // regularised lower incomplete gamma P(a,x)
double gamma_q(double a, double x);  // upper, Q(a,x) = 1 - P(a,x)
double betainc(double a, double b, double x);  // regularised I_x(a, b)

double normal_sf(double z);           // P(Z > z), via erfc
double chi2_sf(double x, double df);  // upper tail of chi-square
double t_sf(double t, double df);     // upper tail of Student t

// Upper-tail binomial P(X >= k), X ~ Binomial(n, p); exact via betainc.
double binom_sf(long long k, long long n, double p);

// --- combination and random-effects meta-analysis ---

struct FisherResult {
  double statistic = 0;  // -2 * sum(log p_i)
  double df = 0;         // 2k
  double p = 1;
  int k = 0;
};
// p-values must lie in (0, 1]; throws std::invalid_argument otherwise.
FisherResult fisher_combined(const std::vector<double>& pvals);

struct MetaResult {
  double mu = 0;    // random-effects pooled estimate
  double se = 0;    // (sum w*)^(-1/2)
  double tau2 = 0;  // between-study variance, DerSimonian-Laird
  double q = 0;     // Cochran heterogeneity statistic
  double i2 = 0;    // max(0, (Q-(k-1))/Q)
  double p_mu = 1;  // two-tailed normal test of mu = 0
  double p_q = 1;   // chi-square upper tail of Q, k-1 df
  int k = 0;
};
// effects y_i with within-study variances v_i > 0; k >= 2 required.
MetaResult dersimonian_laird(const std::vector<double>& effects,
                             const std::vector<double>& variances);

// --- per-site regression of engagement on accuracy ---

enum class Transform { RawLog10, Standardized, Rank };
enum class Tail { Negative, Positive };  // direction of the one-tailed test

struct Regression {
  double slope = 0, intercept = 0;
  double stderr_slope = 0;
  double t = 0;
  double p_one_tailed = 1, p_two_tailed = 1;
  double r2 = 0;
  long long n_used = 0;
  long long n_dropped = 0;  // nonpositive engagement removed before log10
};

// OLS of transformed engagement on transformed accuracy.
//   RawLog10:     y = log10(engagement), x = accuracy
//   Standardized: both variables z-scored after the log10 transform
//   Rank:         both variables replaced by average ranks
// log1p switches the engagement transform to log10(1 + e) (keeps zeros).
// Throws std::invalid_argument with fewer than 3 usable points or zero
// variance in x.
Regression site_regression(const std::vector<double>& accuracy,
                           const std::vector<double>& engagement, Transform tf,
                           Tail tail, bool log1p = false);

// --- dataset ingestion (headline-level observations) ---

enum class SiteClass { Mainstream, Fake };

struct Article {
  std::string site_id;
  SiteClass site_class = SiteClass::Mainstream;
  std::string headline;
  double accuracy = 0;    // rating on the 1..7 scale
  double engagement = 0;  // raw engagement count
  std::string published;  // ISO date, kept verbatim
};

struct Dataset {
  std::vector<Article> articles;
  long long skipped_rows = 0;
  std::vector<std::string> diagnostics;  // one entry per skipped row
};

// CSV with header site_id,site_class,headline,accuracy_mean,engagement,published.
// Malformed rows are skipped with a diagnostic; missing file throws
// std::runtime_error.
Dataset ingest_csv(const std::string& path);

struct TrustRegression {
  double slope = 0, intercept = 0;
  double p_two_tailed = 1;
  double r2 = 0;
  int n = 0;
};
// OLS of per-site (standardized) slopes on site trust ratings.
TrustRegression trust_regression(const std::vector<double>& site_slopes,
                                 const std::vector<double>& trust);

// Average ranks (ties get the mean of their rank range), 1-based.
std::vector<double> average_ranks(const std::vector<double>& values);

}  // namespace newsgame
