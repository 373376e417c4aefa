#ifndef DOSHAP_WEIGHTS_HPP
#define DOSHAP_WEIGHTS_HPP

#include <string>
#include <string_view>
#include <vector>

#include "doshap/graph.hpp"

namespace doshap {

// A cardinality-based weighting scheme: p_0..p_{d-1} weight the coalition
// size in the marginal-contribution sum. Shapley normalizes so that
// sum_l C(d-1,l) p_l = 1; Banzhaf is flat; beta(alpha,beta) interpolates.
class WeightScheme {
 public:
  static WeightScheme shapley(int d);
  static WeightScheme banzhaf(int d);
  static WeightScheme beta_shapley(int d, double alpha, double beta);

  // "shapley" | "banzhaf" | "beta:alpha,beta"
  static WeightScheme parse(std::string_view text, int d);

  const std::string& name() const { return name_; }
  int player_count() const { return d_; }
  double size_weight(int ell) const { return p_[ell]; }

  // Class weight w_i(c): the net coefficient of nu(c) in player i's
  // attribution, summed in closed form over the class interval. Runs in
  // O(|closure| - |basis| + 1).
  double class_weight(const CoalitionClass& cls, int player) const;

  // (1/d) sum_i |w_i(c)|: the boundary sampler's priority mass.
  double mean_abs_weight(const CoalitionClass& cls) const;

 private:
  WeightScheme(std::string name, int d, std::vector<double> p)
      : name_(std::move(name)), d_(d), p_(std::move(p)) {}

  // sum over l = |basis|..|closure| of p_{l+offset} * C(|closure|-|basis|, l-|basis|)
  double interval_sum(int basis_size, int closure_size, int offset) const;

  std::string name_;
  int d_;
  std::vector<double> p_;
};

}  // namespace doshap

#endif
