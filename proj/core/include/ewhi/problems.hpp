#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ewhi {

struct Evaluation {
  std::vector<double> objectives;
  std::vector<double> constraints;  // g_j(x) <= 0 is feasible

  bool feasible() const;
};

/// Black-box problem: objectives to minimize under constraints g(x) <= 0.
struct Problem {
  std::string name;
  std::size_t dimension = 0;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::size_t num_objectives = 0;
  std::size_t num_constraints = 0;
  std::function<Evaluation(const Eigen::VectorXd&)> evaluate;
};

/// Constrained bi-objective BNH problem on [0,5] x [0,3].
Problem bnh();

/// f1 = x^2, f2 = (x - 1)^2 on [0, 1]. Its Pareto set is the whole interval.
Problem toy_sphere_pair();

/// Looks up a built-in problem ("bnh", "toy_sphere_pair"). Throws std::invalid_argument.
Problem builtin_problem(const std::string& name);

}  // namespace ewhi
