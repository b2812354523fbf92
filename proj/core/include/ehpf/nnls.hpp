#pragma once

#include <vector>

#include "ehpf/model.hpp"

namespace ehpf {

struct NnlsResult {
  Vector x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Lawson-Hanson active-set solver for min ||A x - b||_2 subject to x_j >= 0
/// for every j not marked free. Free variables are unconstrained in sign.
/// An empty mask means no free variables.
NnlsResult nnls(const Matrix& a, const Vector& b,
                const std::vector<bool>& free = {}, int max_iterations = 0);

}  // namespace ehpf
