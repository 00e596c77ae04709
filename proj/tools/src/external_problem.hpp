#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ewhi/problems.hpp"

namespace ewhi::cli {

/// Runs `/bin/sh -c command` once per evaluation. The child reads one line
/// "x1 ... xd" on stdin and writes one line "f1 ... fp g1 ... gq" on stdout.
/// A nonzero exit status or a malformed line throws ewhi::EvaluationError.
Problem external_problem(const std::string& command, const std::vector<double>& lower,
                         const std::vector<double>& upper, std::size_t num_objectives, std::size_t num_constraints);

}  // namespace ewhi::cli
