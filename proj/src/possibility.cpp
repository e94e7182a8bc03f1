#include "opm/possibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace opm {

namespace {

std::size_t domain_size(const std::vector<Axis>& axes) {
  std::size_t n = 1;
  for (const auto& axis : axes) n *= axis.size();
  return n;
}

void check_axes(const std::vector<Axis>& axes) {
  if (axes.empty()) throw std::invalid_argument("possibility grid needs at least one axis");
  for (const auto& axis : axes) {
    if (axis.points.empty()) throw std::invalid_argument("possibility grid axis is empty");
    if (!axis.labels.empty() && axis.labels.size() != axis.points.size())
      throw std::invalid_argument("axis labels and points differ in length");
  }
}

double max_of(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("possibility values must be finite and nonnegative");
    m = std::max(m, v);
  }
  return m;
}

std::vector<double> divide_by_max(std::span<const double> values, const char* what) {
  const double m = max_of(values);
  if (m <= 0.0) throw std::domain_error(what);
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) v /= m;
  return out;
}

void require_two_factors(const PossibilityGrid& joint) {
  if (joint.rank() != 2) throw std::invalid_argument("operation requires a 2-factor joint domain");
}

}  // namespace

Axis Axis::real(std::vector<double> points) { return Axis{std::move(points), {}}; }

Axis Axis::labelled(std::vector<std::string> labels) {
  std::vector<double> points(labels.size());
  std::iota(points.begin(), points.end(), 0.0);
  return Axis{std::move(points), std::move(labels)};
}

Axis Axis::range(std::size_t count) {
  std::vector<double> points(count);
  std::iota(points.begin(), points.end(), 0.0);
  return Axis{std::move(points), {}};
}

Axis uniform_axis(double lo, double hi, std::size_t count) {
  if (count < 2 || !(hi > lo)) throw std::invalid_argument("uniform axis needs count >= 2 and hi > lo");
  std::vector<double> points(count);
  const double h = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) points[i] = lo + h * static_cast<double>(i);
  return Axis::real(std::move(points));
}

PossibilityGrid::PossibilityGrid(std::vector<Axis> axes, std::vector<double> values)
    : axes_(std::move(axes)), values_(std::move(values)) {
  check_axes(axes_);
  if (values_.size() != domain_size(axes_))
    throw std::invalid_argument("possibility values do not match the domain size");
  const double m = max_of(values_);
  if (m > 1.0) throw std::invalid_argument("possibility values must lie in [0,1]");
  if (m != 1.0) throw std::invalid_argument("possibility function must have maximum exactly 1");
}

PossibilityGrid PossibilityGrid::from_unnormalized(std::vector<Axis> axes, std::vector<double> values) {
  auto normalized = divide_by_max(values, "cannot normalize an all-zero possibility function");
  return PossibilityGrid(std::move(axes), std::move(normalized));
}

PossibilityGrid PossibilityGrid::vacuous(std::vector<Axis> axes) {
  check_axes(axes);
  std::vector<double> ones(domain_size(axes), 1.0);
  return PossibilityGrid(std::move(axes), std::move(ones));
}

double PossibilityGrid::at(std::size_t i, std::size_t j) const {
  return values_[i * axes_[1].size() + j];
}

std::size_t PossibilityGrid::flat_index(std::span<const std::size_t> coords) const {
  if (coords.size() != axes_.size()) throw std::invalid_argument("coordinate rank mismatch");
  std::size_t flat = 0;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (coords[a] >= axes_[a].size()) throw std::out_of_range("grid coordinate out of range");
    flat = flat * axes_[a].size() + coords[a];
  }
  return flat;
}

std::vector<std::size_t> PossibilityGrid::coords(std::size_t flat) const {
  std::vector<std::size_t> c(axes_.size());
  for (std::size_t a = axes_.size(); a-- > 0;) {
    c[a] = flat % axes_[a].size();
    flat /= axes_[a].size();
  }
  return c;
}

PossibilityGrid normalize(std::span<const double> values) {
  return normalize({Axis::range(values.size())}, values);
}

PossibilityGrid normalize(std::vector<Axis> axes, std::span<const double> values) {
  return PossibilityGrid::from_unnormalized(std::move(axes), {values.begin(), values.end()});
}

PossibilityGrid product(const PossibilityGrid& f, const PossibilityGrid& g) {
  std::vector<Axis> axes = f.axes();
  axes.insert(axes.end(), g.axes().begin(), g.axes().end());
  std::vector<double> values;
  values.reserve(f.size() * g.size());
  for (double a : f.values())
    for (double b : g.values()) values.push_back(a * b);
  // max is 1 * 1 = 1 exactly.
  return PossibilityGrid(std::move(axes), std::move(values));
}

PossibilityGrid marginal(const PossibilityGrid& joint, std::size_t keep) {
  if (keep >= joint.rank()) throw std::out_of_range("marginal axis out of range");
  const Axis& axis = joint.axes()[keep];
  std::vector<double> out(axis.size(), 0.0);
  for (std::size_t flat = 0; flat < joint.size(); ++flat) {
    const auto c = joint.coords(flat);
    out[c[keep]] = std::max(out[c[keep]], joint[flat]);
  }
  return PossibilityGrid({axis}, std::move(out));
}

PossibilityGrid condition(const PossibilityGrid& joint, std::size_t given_axis,
                          std::size_t given_index) {
  require_two_factors(joint);
  if (given_axis > 1) throw std::out_of_range("conditioning axis out of range");
  const std::size_t free_axis = 1 - given_axis;
  if (given_index >= joint.axes()[given_axis].size())
    throw std::out_of_range("conditioning point out of range");
  const std::size_t n = joint.axes()[free_axis].size();
  std::vector<double> slice(n);
  for (std::size_t k = 0; k < n; ++k)
    slice[k] = given_axis == 1 ? joint.at(k, given_index) : joint.at(given_index, k);
  const double credibility = *std::max_element(slice.begin(), slice.end());
  if (credibility <= 0.0) throw std::domain_error("conditioning on incredible point");
  for (double& v : slice) v /= credibility;
  return PossibilityGrid({joint.axes()[free_axis]}, std::move(slice));
}

PossibilityGrid bayes_update(const PossibilityGrid& prior, std::span<const double> likelihood) {
  if (likelihood.size() != prior.size())
    throw std::invalid_argument("likelihood does not match the prior domain");
  std::vector<double> joint(prior.size());
  for (std::size_t i = 0; i < prior.size(); ++i) {
    if (!std::isfinite(likelihood[i]) || likelihood[i] < 0.0)
      throw std::invalid_argument("likelihood values must be finite and nonnegative");
    joint[i] = prior[i] * likelihood[i];
  }
  return PossibilityGrid(prior.axes(), divide_by_max(joint, "incompatible evidence: zero supremum"));
}

PossibilityGrid pushforward(const PossibilityGrid& f, std::span<const std::size_t> image,
                            std::vector<Axis> codomain) {
  if (image.size() != f.size()) throw std::invalid_argument("map must be defined on the whole domain");
  check_axes(codomain);
  std::vector<double> out(domain_size(codomain), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (image[i] >= out.size()) throw std::out_of_range("map image outside the codomain");
    out[image[i]] = std::max(out[image[i]], f[i]);
  }
  return PossibilityGrid(std::move(codomain), std::move(out));
}

PossibilityGrid pullback(const PossibilityGrid& f_psi, std::span<const std::size_t> image,
                         std::vector<Axis> domain) {
  check_axes(domain);
  if (image.size() != domain_size(domain)) throw std::invalid_argument("map must be defined on the whole domain");
  std::vector<double> out(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (image[i] >= f_psi.size()) throw std::out_of_range("map image outside the codomain");
    out[i] = f_psi[image[i]];
  }
  return PossibilityGrid(std::move(domain),
                         divide_by_max(out, "pullback: image of the map is entirely incredible"));
}

ExpectationResult expect_star(const PossibilityGrid& f) {
  ExpectationResult result;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] == 1.0) result.argmax_set.push_back(i);
  result.is_singleton = result.argmax_set.size() == 1;
  if (!result.is_singleton) {
    result.variance = std::numeric_limits<double>::infinity();
    return result;
  }
  const std::size_t mode = result.argmax_set.front();
  if (f.rank() == 1 && f.axes()[0].labels.empty() && mode > 0 && mode + 1 < f.size()) {
    try {
      result.variance = variance_star(f);
    } catch (const std::invalid_argument&) {
      // non-uniform spacing: leave undefined
    }
  }
  return result;
}

double variance_star(const PossibilityGrid& f) {
  if (f.rank() != 1) throw std::invalid_argument("variance_star needs a 1-D grid");
  const auto& pts = f.axes()[0].points;
  if (pts.size() < 3) throw std::invalid_argument("variance_star needs at least 3 grid points");
  const double h = pts[1] - pts[0];
  if (!(h > 0.0)) throw std::invalid_argument("grid points must be increasing");
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (std::abs((pts[i] - pts[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::invalid_argument("variance_star needs a uniform grid");

  std::size_t mode = f.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] == 1.0) {
      mode = i;
      ++count;
    }
  if (count != 1) return std::numeric_limits<double>::infinity();
  if (mode == 0 || mode + 1 == f.size())
    throw std::domain_error("mode on the grid boundary: second difference undefined");
  const double second = (f[mode + 1] - 2.0 * f[mode] + f[mode - 1]) / (h * h);
  return -1.0 / second;
}

PossibilityGrid independence_envelope(const PossibilityGrid& joint) {
  require_two_factors(joint);
  const auto f_theta = marginal(joint, 0);
  const auto f_psi = marginal(joint, 1);
  std::vector<double> out(joint.size());
  const std::size_t cols = f_psi.size();
  for (std::size_t i = 0; i < f_theta.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = std::sqrt(f_theta[i] * f_psi[j]);
  return PossibilityGrid(joint.axes(), std::move(out));
}

bool is_independent(const PossibilityGrid& joint, double tol) {
  require_two_factors(joint);
  const auto f_theta = marginal(joint, 0);
  const auto f_psi = marginal(joint, 1);
  const std::size_t cols = f_psi.size();
  for (std::size_t i = 0; i < f_theta.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (std::abs(joint.at(i, j) - f_theta[i] * f_psi[j]) > tol) return false;
  return true;
}

DiscreteOPM::DiscreteOPM(PossibilityGrid parameter, Eigen::MatrixXd laws)
    : parameter_(std::move(parameter)), laws_(std::move(laws)) {
  if (static_cast<std::size_t>(laws_.rows()) != parameter_.size())
    throw std::invalid_argument("one conditional law is needed per parameter value");
  if (laws_.cols() == 0) throw std::invalid_argument("outcome set is empty");
  for (Eigen::Index r = 0; r < laws_.rows(); ++r) {
    if ((laws_.row(r).array() < 0.0).any() || !laws_.row(r).allFinite())
      throw std::invalid_argument("conditional law has negative or non-finite entries");
    if (std::abs(laws_.row(r).sum() - 1.0) > 1e-12)
      throw std::invalid_argument("conditional law does not sum to 1");
  }
}

bool DiscreteOPM::laws_independent_of_parameter() const {
  for (Eigen::Index r = 1; r < laws_.rows(); ++r)
    if ((laws_.row(r) - laws_.row(0)).cwiseAbs().maxCoeff() > 1e-12) return false;
  return true;
}

double upper_expectation(const DiscreteOPM& opm, const Eigen::MatrixXd& phi, Ordering ordering) {
  const auto& laws = opm.laws();
  if (phi.rows() != laws.rows() || phi.cols() != laws.cols())
    throw std::invalid_argument("test function must be |Theta| x |X|");
  if (!phi.allFinite()) throw std::invalid_argument("test function must be bounded");
  const auto& f = opm.parameter().values();

  if (ordering == Ordering::UncertainThenRandom) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < laws.rows(); ++t) {
      best = std::max(best, f[t] * laws.row(t).dot(phi.row(t)));
    }
    return best;
  }

  if (!opm.laws_independent_of_parameter())
    throw std::invalid_argument("random-then-uncertain ordering requires a parameter-independent law");
  double total = 0.0;
  for (Eigen::Index x = 0; x < laws.cols(); ++x) {
    double inner = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < laws.rows(); ++t) {
      inner = std::max(inner, f[t] * phi(t, x));
    }
    total += laws(0, x) * inner;
  }
  return total;
}

std::vector<std::vector<double>> simplex_lattice(std::size_t dim, std::size_t resolution) {
  if (dim == 0 || resolution == 0) throw std::invalid_argument("simplex lattice needs dim, resolution >= 1");
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> counts(dim, 0);
  const double m = static_cast<double>(resolution);
  // Enumerate compositions of `resolution` into `dim` parts.
  auto recurse = [&](auto&& self, std::size_t axis, std::size_t remaining) -> void {
    if (axis + 1 == dim) {
      counts[axis] = remaining;
      std::vector<double> p(dim);
      for (std::size_t i = 0; i < dim; ++i) p[i] = static_cast<double>(counts[i]) / m;
      points.push_back(std::move(p));
      return;
    }
    for (std::size_t n = 0; n <= remaining; ++n) {
      counts[axis] = n;
      self(self, axis + 1, remaining - n);
    }
  };
  recurse(recurse, 0, resolution);
  return points;
}

}  // namespace opm
