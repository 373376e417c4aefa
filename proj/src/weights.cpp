#include "doshap/weights.hpp"

#include <cmath>
#include <cstdlib>

#include "doshap/combinatorics.hpp"
#include "doshap/error.hpp"

namespace doshap {

namespace {

void check_dimension(int d) {
  if (d < 0 || d > Coalition::kMaxPlayers) {
    fail(ErrorKind::invalid_argument, "weight scheme dimension out of range");
  }
}

}  // namespace

WeightScheme WeightScheme::shapley(int d) {
  check_dimension(d);
  std::vector<double> p(static_cast<std::size_t>(std::max(d, 0)));
  for (int ell = 0; ell < d; ++ell) {
    p[ell] = 1.0 / (d * combin::binom(d - 1, ell));
  }
  return WeightScheme("shapley", d, std::move(p));
}

WeightScheme WeightScheme::banzhaf(int d) {
  check_dimension(d);
  std::vector<double> p(static_cast<std::size_t>(std::max(d, 0)),
                        d > 0 ? std::ldexp(1.0, -(d - 1)) : 0.0);
  return WeightScheme("banzhaf", d, std::move(p));
}

WeightScheme WeightScheme::beta_shapley(int d, double alpha, double beta) {
  check_dimension(d);
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    fail(ErrorKind::invalid_argument, "beta scheme parameters must be positive");
  }
  // p_l proportional to B(l + beta, d - l + alpha - 1), normalized so that
  // sum_l C(d-1,l) p_l = 1. With (1,1) this reduces to the Shapley weights.
  std::vector<double> p(static_cast<std::size_t>(std::max(d, 0)));
  double norm = 0.0;
  for (int ell = 0; ell < d; ++ell) {
    const double log_b = std::lgamma(ell + beta) + std::lgamma(d - ell + alpha - 1.0) -
                         std::lgamma(d + alpha + beta - 1.0);
    p[ell] = std::exp(log_b);
    norm += combin::binom(d - 1, ell) * p[ell];
  }
  for (int ell = 0; ell < d; ++ell) p[ell] /= norm;
  char name[64];
  std::snprintf(name, sizeof(name), "beta:%g,%g", alpha, beta);
  return WeightScheme(name, d, std::move(p));
}

WeightScheme WeightScheme::parse(std::string_view text, int d) {
  if (text == "shapley") return shapley(d);
  if (text == "banzhaf") return banzhaf(d);
  if (text.rfind("beta:", 0) == 0) {
    const std::string args(text.substr(5));
    char* end = nullptr;
    const double alpha = std::strtod(args.c_str(), &end);
    if (end == nullptr || *end != ',') {
      fail(ErrorKind::validation, "scheme 'beta' expects beta:alpha,beta");
    }
    const double beta = std::strtod(end + 1, &end);
    if (end == nullptr || *end != '\0') {
      fail(ErrorKind::validation, "scheme 'beta' expects beta:alpha,beta");
    }
    return beta_shapley(d, alpha, beta);
  }
  fail(ErrorKind::validation, "unknown weight scheme '" + std::string(text) + "'");
}

double WeightScheme::interval_sum(int basis_size, int closure_size, int offset) const {
  // All terms are nonnegative; compensated summation keeps the round-off
  // well below the 1e-10 contract at d = 64.
  double sum = 0.0;
  double carry = 0.0;
  const int free_count = closure_size - basis_size;
  for (int ell = basis_size; ell <= closure_size; ++ell) {
    const double term = p_[ell + offset] * combin::binom(free_count, ell - basis_size);
    const double y = term - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double WeightScheme::class_weight(const CoalitionClass& cls, int player) const {
  if (player < 0 || player >= d_) {
    fail(ErrorKind::invalid_argument, "class_weight: player index out of range");
  }
  if (cls.basis.contains(player)) {
    return interval_sum(cls.basis.size(), cls.closure.size(), -1);
  }
  if (!cls.closure.contains(player)) {
    return -interval_sum(cls.basis.size(), cls.closure.size(), 0);
  }
  return 0.0;
}

double WeightScheme::mean_abs_weight(const CoalitionClass& cls) const {
  if (d_ == 0) return 0.0;
  const int inside = cls.basis.size();
  const int outside = d_ - cls.closure.size();
  double total = 0.0;
  if (inside > 0) {
    total += inside * std::abs(interval_sum(inside, cls.closure.size(), -1));
  }
  if (outside > 0) {
    total += outside * std::abs(interval_sum(inside, cls.closure.size(), 0));
  }
  return total / d_;
}

}  // namespace doshap
