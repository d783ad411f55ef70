#include "safem/linear_solver.hpp"

#include <cstdio>

#ifdef SAFEM_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#else
#include <Eigen/SparseCholesky>
#endif

namespace safem {

const char* spd_backend() {
#ifdef SAFEM_HAVE_CHOLMOD
  return "cholmod-simplicial";
#else
  return "eigen-simplicial-ldlt";
#endif
}

Vector solve_spd(const SparseMatrix& A, const Vector& b, double rel_tol) {
  if (A.rows() != A.cols() || A.rows() != b.size()) {
    throw std::invalid_argument("solve_spd: dimension mismatch");
  }
  const double bnorm = b.norm();
  if (b.size() == 0 || bnorm == 0.0) return Vector::Zero(b.size());
#ifdef SAFEM_HAVE_CHOLMOD
  // The supernodal path goes through the system BLAS, which has produced
  // silently wrong factors on some CPUs; the simplicial one does not use it.
  Eigen::CholmodSimplicialLLT<SparseMatrix, Eigen::Lower> solver;
#else
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> solver;
#endif
  solver.compute(A);
  if (solver.info() != Eigen::Success) {
    throw SolverError("solve_spd: factorisation failed (matrix not positive definite?)", -1.0);
  }
  Vector x = solver.solve(b);
  double res = (b - A * x).norm() / bnorm;
  // Refine well past the acceptance level while it still helps; downstream
  // quantities are differences of nearly equal functionals.
  for (int it = 0; it < 4 && res > 1e-3 * rel_tol; ++it) {
    Vector y = x + solver.solve(b - A * x);
    const double r = (b - A * y).norm() / bnorm;
    if (!(r < res)) break;
    x = std::move(y);
    res = r;
  }
  if (!(res <= rel_tol)) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "solve_spd: relative residual %.3e above %.1e", res, rel_tol);
    throw SolverError(msg, res);
  }
  return x;
}

}  // namespace safem
