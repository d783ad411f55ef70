#pragma once

#include <Eigen/Sparse>
#include <stdexcept>
#include <string>

namespace safem {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Sparse Cholesky solve of an SPD system followed by iterative refinement
/// until ||Ax - b|| <= rel_tol ||b||. Throws SolverError when factorisation
/// fails or the tolerance is not met.
Vector solve_spd(const SparseMatrix& A, const Vector& b, double rel_tol = 1e-11);

/// Name of the factorisation backend compiled in.
const char* spd_backend();

}  // namespace safem
