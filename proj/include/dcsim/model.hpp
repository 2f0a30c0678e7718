#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dcsim/grid.hpp"

namespace dcsim {

/// Chemotactic sensitivity phi(u). Bounds |phi| <= 1 and |phi'| <= 1 are
/// checked once, when the descriptor is built; evaluation is unchecked.
class Sensitivity {
 public:
  enum class Kind { constant, linear_switch, table };

  /// phi == c.
  static Sensitivity constant(double c);
  /// phi(u) = 1 - u/u_star clamped to [-1, 1]. Requires u_star >= 1.
  static Sensitivity linear_switch(double u_star);
  /// Piecewise-linear through (u_k, phi_k), held constant outside the table.
  static Sensitivity table(std::vector<std::pair<double, double>> points);

  Sensitivity() : Sensitivity(constant(1.0)) {}

  double operator()(double u) const;

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

  /// Text form used by the config format, e.g. "linear_switch 1".
  std::string describe() const;
  static Sensitivity parse(const std::string& text);

  bool operator==(const Sensitivity&) const = default;

 private:
  Sensitivity(Kind k, double p, std::vector<std::pair<double, double>> pts)
      : kind_(k), param_(p), points_(std::move(pts)) {}

  Kind kind_;
  double param_;
  std::vector<std::pair<double, double>> points_;
};

struct ModelParams {
  double m = 2.0;
  double delta = 1.0;
  double mu = 1.0;
  double r = 1.0;
  Sensitivity phi;
  double eps_reg = 0.0;

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const;
  /// Additional hypothesis 1 <= delta < m of the early/late-stage results.
  void validate_theorem_mode() const;

  bool operator==(const ModelParams&) const = default;
};

/// Cell density u, ECM fragments v, ECM w, enzyme z on one grid at time t.
struct StateQuad {
  Field u, v, w, z;
  double t = 0.0;

  StateQuad() = default;
  explicit StateQuad(const Grid& g) : u(g), v(g), w(g), z(g) {}

  const Grid& grid() const { return u.grid; }
  bool all_finite() const;
  /// Throws if the four fields disagree on the grid or a value is non-finite.
  void validate() const;
};

/// Jump probability q(u) = u^(m-1); q(0) = 0.
double q_eval(double u, double m);

double phi_eval(double u, const Sensitivity& phi);

/// Logistic source mu u^delta (1 - r u).
double logistic_eval(double u, const ModelParams& p);

}  // namespace dcsim
