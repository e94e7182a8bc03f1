#pragma once

// Possibility functions on finite discrete domains and discrete outer
// probability measures (a possibility function over parameters combined
// with a parametrised family of probability vectors).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace opm {

/// One factor of a Cartesian-product domain. Points are real coordinates;
/// labels are optional display names (same length as points when present).
struct Axis {
  std::vector<double> points;
  std::vector<std::string> labels;

  static Axis real(std::vector<double> points);
  static Axis labelled(std::vector<std::string> labels);
  static Axis range(std::size_t count);

  std::size_t size() const { return points.size(); }
  bool operator==(const Axis&) const = default;
};

/// Uniform grid of `count` points on [lo, hi].
Axis uniform_axis(double lo, double hi, std::size_t count);

/// A possibility function on a finite product domain. Values are stored
/// row-major (last axis fastest). Every value is in [0,1] and the maximum
/// is exactly 1.
class PossibilityGrid {
 public:
  /// Validates `values` against the invariants without rescaling.
  PossibilityGrid(std::vector<Axis> axes, std::vector<double> values);

  /// Divides by the maximum; rejects all-zero or non-finite input.
  static PossibilityGrid from_unnormalized(std::vector<Axis> axes, std::vector<double> values);
  static PossibilityGrid vacuous(std::vector<Axis> axes);

  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  std::size_t rank() const { return axes_.size(); }

  double operator[](std::size_t flat) const { return values_[flat]; }
  double at(std::size_t i, std::size_t j) const;

  std::size_t flat_index(std::span<const std::size_t> coords) const;
  std::vector<std::size_t> coords(std::size_t flat) const;

 private:
  std::vector<Axis> axes_;
  std::vector<double> values_;
};

/// Sup-normalization of a nonnegative array on an index domain 0..n-1.
PossibilityGrid normalize(std::span<const double> values);
PossibilityGrid normalize(std::vector<Axis> axes, std::span<const double> values);

/// Outer product f(i) * g(j) on the product of both domains.
PossibilityGrid product(const PossibilityGrid& f, const PossibilityGrid& g);

/// Sup over every axis except `keep`.
PossibilityGrid marginal(const PossibilityGrid& joint, std::size_t keep);

/// Conditional on a 2-factor joint: fixes `given_axis` at `given_index` and
/// returns the possibility function of the remaining factor. Throws
/// std::domain_error when the conditioning point is incredible.
PossibilityGrid condition(const PossibilityGrid& joint, std::size_t given_axis,
                          std::size_t given_index);

/// prior * likelihood, sup-normalized. Throws std::domain_error when the
/// evidence is incompatible with the prior (zero supremum).
PossibilityGrid bayes_update(const PossibilityGrid& prior, std::span<const double> likelihood);

/// psi(j) = max { f(i) : image[i] == j }, with max of the empty set = 0.
PossibilityGrid pushforward(const PossibilityGrid& f, std::span<const std::size_t> image,
                            std::vector<Axis> codomain);

/// theta(i) = f_psi(image[i]) renormalized over the image of the map.
PossibilityGrid pullback(const PossibilityGrid& f_psi, std::span<const std::size_t> image,
                         std::vector<Axis> domain);

struct ExpectationResult {
  std::vector<std::size_t> argmax_set;  // flat indices
  bool is_singleton = false;
  // +inf when the argmax is not a singleton; empty when the mode is a
  // singleton but the second difference is undefined (boundary, non-real
  // or multi-axis domain).
  std::optional<double> variance;
};

ExpectationResult expect_star(const PossibilityGrid& f);

/// -1 / f'' at the mode, using a central second difference on a uniform
/// 1-D real grid. Returns +inf for a non-singleton argmax; throws
/// std::domain_error when the mode is on the boundary.
double variance_star(const PossibilityGrid& f);

/// sqrt(f_theta(i) * f_psi(j)) from the two marginals of a 2-factor joint.
PossibilityGrid independence_envelope(const PossibilityGrid& joint);

bool is_independent(const PossibilityGrid& joint, double tol);

enum class Ordering {
  UncertainThenRandom,  // sup over theta outside the expectation
  RandomThenUncertain,  // expectation outside the sup over theta
};

/// A possibility function over a finite parameter set together with one
/// probability vector over a finite outcome set per parameter value.
class DiscreteOPM {
 public:
  /// `laws` is |Theta| x |X|; each row sums to 1 within 1e-12.
  DiscreteOPM(PossibilityGrid parameter, Eigen::MatrixXd laws);

  const PossibilityGrid& parameter() const { return parameter_; }
  const Eigen::MatrixXd& laws() const { return laws_; }
  std::size_t parameter_count() const { return parameter_.size(); }
  std::size_t outcome_count() const { return static_cast<std::size_t>(laws_.cols()); }

  /// True when every conditional law is the same vector (within 1e-12).
  bool laws_independent_of_parameter() const;

 private:
  PossibilityGrid parameter_;
  Eigen::MatrixXd laws_;
};

/// Upper expectation of a test function phi(theta, x) given as a
/// |Theta| x |X| matrix. The random-then-uncertain ordering is only defined
/// here for parameter-independent laws (std::invalid_argument otherwise).
double upper_expectation(const DiscreteOPM& opm, const Eigen::MatrixXd& phi, Ordering ordering);

/// Credibility of an event B, a subset of Theta x X given as an indicator.
inline double credibility(const DiscreteOPM& opm, const Eigen::MatrixXd& indicator,
                          Ordering ordering) {
  return upper_expectation(opm, indicator, ordering);
}

/// Points of the uniform simplex lattice {n / resolution : sum n = resolution}
/// in dimension `dim`, in lexicographic order.
std::vector<std::vector<double>> simplex_lattice(std::size_t dim, std::size_t resolution);

}  // namespace opm
