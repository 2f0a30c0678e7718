#include "dcsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dcsim/errors.hpp"

namespace dcsim {

// ---------------------------------------------------------------- Grid/Field

Grid::Grid(int dim, int cells_per_axis, double extent, double origin)
    : Grid(dim, {cells_per_axis, dim == 2 ? cells_per_axis : 1},
           {extent, dim == 2 ? extent : 0.0}, {origin, dim == 2 ? origin : 0.0}) {}

Grid::Grid(int dim, std::array<int, 2> cells, std::array<double, 2> extent,
           std::array<double, 2> origin)
    : dim_(dim), cells_(cells), extent_(extent), origin_(origin) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid dim must be 1 or 2");
  if (dim == 1) {
    cells_[1] = 1;
    extent_[1] = 0.0;
    origin_[1] = 0.0;
  }
  for (int a = 0; a < dim; ++a) {
    if (cells_[a] < 4) throw std::invalid_argument("grid needs at least 4 cells per axis");
    if (!(extent_[a] > 0.0) || !std::isfinite(extent_[a]))
      throw std::invalid_argument("grid extent must be positive");
  }
  h_ = extent_[0] / cells_[0];
  if (dim == 2) {
    const double hy = extent_[1] / cells_[1];
    if (std::abs(hy - h_) > 1e-12 * h_)
      throw std::invalid_argument("grid spacing must be equal on both axes");
  }
}

std::size_t Grid::size() const {
  return static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(cells_[1]);
}

double Grid::cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }

Coord Grid::cell_center(std::size_t flat) const {
  const int i = static_cast<int>(flat % static_cast<std::size_t>(cells_[0]));
  const int j = static_cast<int>(flat / static_cast<std::size_t>(cells_[0]));
  Coord c{center(0, i), 0.0, 0.0};
  if (dim_ == 2) c[1] = center(1, j);
  return c;
}

double Grid::diameter() const { return std::hypot(extent_[0], extent_[1]); }

double Field::max() const { return *std::max_element(values.begin(), values.end()); }
double Field::min() const { return *std::min_element(values.begin(), values.end()); }

double Field::integral() const {
  double s = 0.0;
  for (double x : values) s += x;
  return s * grid.cell_volume();
}

double Field::mean() const {
  double s = 0.0;
  for (double x : values) s += x;
  return s / static_cast<double>(values.size());
}

bool Field::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

double squared_distance(const Coord& a, const Coord& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

// ------------------------------------------------------------- Sensitivity

Sensitivity Sensitivity::constant(double c) {
  if (!(std::abs(c) <= 1.0)) throw std::invalid_argument("constant sensitivity must satisfy |c| <= 1");
  return {Kind::constant, c, {}};
}

Sensitivity Sensitivity::linear_switch(double u_star) {
  // slope is -1/u_star
  if (!(u_star >= 1.0) || !std::isfinite(u_star))
    throw std::invalid_argument("linear_switch needs u* >= 1 so that |phi'| <= 1");
  return {Kind::linear_switch, u_star, {}};
}

Sensitivity Sensitivity::table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("sensitivity table needs at least 2 points");
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto [u, p] = points[k];
    if (!std::isfinite(u) || !(std::abs(p) <= 1.0))
      throw std::invalid_argument("sensitivity table value violates |phi| <= 1");
    if (k > 0) {
      const auto [u0, p0] = points[k - 1];
      if (!(u > u0)) throw std::invalid_argument("sensitivity table abscissae must increase");
      if (std::abs(p - p0) > (u - u0) * (1.0 + 1e-12))
        throw std::invalid_argument("sensitivity table slope violates |phi'| <= 1");
    }
  }
  return {Kind::table, 0.0, std::move(points)};
}

double Sensitivity::operator()(double u) const {
  switch (kind_) {
    case Kind::constant:
      return param_;
    case Kind::linear_switch:
      return std::clamp(1.0 - u / param_, -1.0, 1.0);
    case Kind::table: {
      if (u <= points_.front().first) return points_.front().second;
      if (u >= points_.back().first) return points_.back().second;
      auto it = std::upper_bound(points_.begin(), points_.end(), u,
                                 [](double x, const auto& pt) { return x < pt.first; });
      const auto& [u1, p1] = *it;
      const auto& [u0, p0] = *(it - 1);
      return p0 + (p1 - p0) * (u - u0) / (u1 - u0);
    }
  }
  return 0.0;
}

std::string Sensitivity::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::constant:
      os << "constant " << param_;
      break;
    case Kind::linear_switch:
      os << "linear_switch " << param_;
      break;
    case Kind::table:
      os << "table ";
      for (std::size_t k = 0; k < points_.size(); ++k)
        os << (k ? "," : "") << points_[k].first << ':' << points_[k].second;
      break;
  }
  return os.str();
}

Sensitivity Sensitivity::parse(const std::string& text) {
  std::istringstream is(text);
  std::string kind;
  is >> kind;
  if (kind == "constant" || kind == "linear_switch") {
    double x;
    if (!(is >> x)) throw std::invalid_argument("phi: missing numeric parameter");
    std::string rest;
    if (is >> rest) throw std::invalid_argument("phi: trailing text '" + rest + "'");
    return kind == "constant" ? constant(x) : linear_switch(x);
  }
  if (kind == "table") {
    std::string body;
    std::getline(is, body);
    std::vector<std::pair<double, double>> pts;
    std::istringstream items(body);
    std::string item;
    while (std::getline(items, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("phi table entry needs u:phi");
      try {
        pts.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
      } catch (const std::logic_error&) {
        throw std::invalid_argument("phi table entry '" + item + "' is not numeric");
      }
    }
    return table(std::move(pts));
  }
  throw std::invalid_argument("phi: unknown descriptor '" + kind + "'");
}

// ------------------------------------------------------------- ModelParams

void ModelParams::validate() const {
  if (!(m > 1.0) || !std::isfinite(m)) throw std::invalid_argument("m must exceed 1");
  if (!(delta >= 1.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be at least 1");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be nonnegative");
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("r must be positive");
  if (!(eps_reg >= 0.0 && eps_reg < 1.0)) throw std::invalid_argument("eps_reg must lie in [0, 1)");
}

void ModelParams::validate_theorem_mode() const {
  validate();
  if (!(delta < m)) throw HypothesisError("theorem mode requires 1 <= delta < m");
  if (!(mu > 0.0)) throw HypothesisError("theorem mode requires mu > 0");
}

bool StateQuad::all_finite() const {
  return u.all_finite() && v.all_finite() && w.all_finite() && z.all_finite();
}

void StateQuad::validate() const {
  const Grid& g = u.grid;
  if (!(v.grid == g && w.grid == g && z.grid == g))
    throw std::invalid_argument("state fields live on different grids");
  for (const Field* f : {&u, &v, &w, &z})
    if (f->values.size() != g.size()) throw std::invalid_argument("field size does not match grid");
  if (!all_finite()) throw NumericalError("state contains non-finite values");
}

// -------------------------------------------------------- pointwise laws

double q_eval(double u, double m) {
  if (u < 0.0) throw std::domain_error("q_eval: negative density");
  if (u == 0.0) return 0.0;
  return std::pow(u, m - 1.0);
}

double phi_eval(double u, const Sensitivity& phi) { return phi(u); }

double logistic_eval(double u, const ModelParams& p) {
  if (u < 0.0) throw std::domain_error("logistic_eval: negative density");
  if (u == 0.0) return 0.0;
  return p.mu * std::pow(u, p.delta) * (1.0 - p.r * u);
}

}  // namespace dcsim
