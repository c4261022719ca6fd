/** \file
 * \brief Quality checks for approximate inverses and reference replays of the iterations.
 */

#ifndef SPAI_VERIFY_HPP
#define SPAI_VERIFY_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spai/methods.hpp"
#include "spai/sparse.hpp"

namespace spai {

struct SolveReport
{
	Index iterations = 0;
	/// ||b - A x_i||_2 / (||A||_F ||x_i||_2 + ||b||_2) after each iteration.
	std::vector<double> backward_errors;
	bool converged = false;
	double tol = 0.0;
};

/// Normwise backward error of x as a solution of A x = b.
double backward_error(const SparseMat& A, std::span<const double> x, std::span<const double> b,
                      double frob_A);

/// Conjugate gradient on A x = b from x = 0, preconditioned by x -> M x when M is given.
/**
 * Stops once the backward error drops below tol or after maxit iterations. A
 * non-positive curvature or preconditioned residual product ends the solve
 * with converged = false.
 */
SolveReport linear_pcg(const SparseMat& A, std::span<const double> b, const SparseMat* M,
                       double tol, Index maxit);

enum class ProbeMethod { Dense, Lanczos };

struct SpectralProbe
{
	double lambda_min_est = 0.0;
	double lambda_max_est = 0.0;
	bool is_spd = false;
	ProbeMethod method = ProbeMethod::Dense;
	bool converged = true;
	/// Lanczos steps taken by the accepted attempt (0 for the dense path).
	Index lanczos_steps = 0;
};

struct ProbeOptions
{
	/// Orders up to this use a dense eigendecomposition.
	Index dense_limit = 1000;
	/// Relative residual for accepting the extreme Ritz pairs.
	double rel_tol = 1e-8;
	Index max_steps = 600;
	int attempts = 3;
	std::uint64_t seed = 0x5eed;
};

/// Extreme eigenvalues of (M + M^T)/2.
SpectralProbe spectral_probe(const SparseMat& M, const ProbeOptions& opts = {});

/// All eigenvalues of (X + X^T)/2 in ascending order, via a dense solve.
std::vector<double> dense_spectrum(const SparseMat& X);

/// Dense replay of an iteration without dropping; returns M_0, ..., M_iters.
/**
 * Pi is required exactly for preconditioned methods. Throws BreakdownError
 * under the same conditions as step().
 */
std::vector<DenseMat> dense_oracle(Method method, const DenseMat& A, const DenseMat& M0,
                                   const DenseMat* Pi, Index iters);

struct BoundRow
{
	Index iter = 0;
	/// ||A^{-1} - M_i||_{F,A} / ||A^{-1} - M_0||_{F,A}.
	double ratio = 0.0;
	double bound = 0.0;
	double margin = 0.0;
};

struct BoundReport
{
	double kappa = 0.0;
	std::vector<BoundRow> rows;
};

/// Error-ratio against the a priori bound for NCG (kappa) or CG (sqrt(kappa)).
/** Throws std::invalid_argument for other methods. */
BoundReport check_bounds(const SparseMat& A, std::span<const SparseMat> trajectory, Method method);

} // namespace spai

#endif
