#include "ewhi/problems.hpp"

#include <algorithm>
#include <stdexcept>

namespace ewhi {

bool Evaluation::feasible() const {
  return std::all_of(constraints.begin(), constraints.end(), [](double g) { return g <= 0.0; });
}

Problem bnh() {
  Problem p;
  p.name = "bnh";
  p.dimension = 2;
  p.lower = Eigen::Vector2d(0.0, 0.0);
  p.upper = Eigen::Vector2d(5.0, 3.0);
  p.num_objectives = 2;
  p.num_constraints = 2;
  p.evaluate = [](const Eigen::VectorXd& x) {
    const double x1 = x(0), x2 = x(1);
    Evaluation e;
    e.objectives = {4.0 * x1 * x1 + 4.0 * x2 * x2, (x1 - 5.0) * (x1 - 5.0) + (x2 - 5.0) * (x2 - 5.0)};
    e.constraints = {(x1 - 5.0) * (x1 - 5.0) + x2 * x2 - 25.0, 7.7 - (x1 - 8.0) * (x1 - 8.0) - (x2 + 3.0) * (x2 + 3.0)};
    return e;
  };
  return p;
}

Problem toy_sphere_pair() {
  Problem p;
  p.name = "toy_sphere_pair";
  p.dimension = 1;
  p.lower = Eigen::VectorXd::Zero(1);
  p.upper = Eigen::VectorXd::Ones(1);
  p.num_objectives = 2;
  p.num_constraints = 0;
  p.evaluate = [](const Eigen::VectorXd& x) {
    const double t = x(0);
    return Evaluation{{t * t, (t - 1.0) * (t - 1.0)}, {}};
  };
  return p;
}

Problem builtin_problem(const std::string& name) {
  if (name == "bnh") return bnh();
  if (name == "toy_sphere_pair") return toy_sphere_pair();
  throw std::invalid_argument("unknown problem '" + name + "'");
}

}  // namespace ewhi
