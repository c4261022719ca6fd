/** \file
 * \brief Global iterations for sparse approximate inverses of SPD matrices.
 *
 * Every method advances a whole matrix iterate M so as to reduce
 * ||I - A M||_F. The five base methods (MR, SD, NCG, CG, LOMR) each have a
 * preconditioned variant (PMR, PSD, NPCG, PCG, LOPMR) selected by the
 * `preconditioned` flag of Method.
 */

#ifndef SPAI_METHODS_HPP
#define SPAI_METHODS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spai/dropping.hpp"
#include "spai/sparse.hpp"

namespace spai {

enum class MethodKind { MR, SD, NCG, CG, LOMR };

inline constexpr std::array<MethodKind, 5> all_method_kinds = {
	MethodKind::MR, MethodKind::SD, MethodKind::NCG, MethodKind::CG, MethodKind::LOMR};

struct Method
{
	MethodKind kind = MethodKind::MR;
	bool preconditioned = false;

	friend bool operator==(const Method&, const Method&) = default;
};

/// Upper-case algorithm name: MR, SD, ..., PMR, PSD, NPCG, PCG, LOPMR.
std::string method_name(Method m);
/// Lower-case token used on the command line: mr, sd, ncg, cg, lomr.
std::string method_token(MethodKind k);
/// Parses a token such as "lomr"; throws std::invalid_argument otherwise.
MethodKind parse_method_kind(std::string_view token);

/// A step-size denominator vanished or lost the sign SPD-ness guarantees.
class BreakdownError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument
{
public:
	using std::invalid_argument::invalid_argument;
};

/// Kernel invocations made by one iteration.
struct KernelCounts
{
	int spgemm = 0;
	int spgeam = 0;
	int inner = 0;
	int norm = 0;

	friend bool operator==(const KernelCounts&, const KernelCounts&) = default;
};

struct StepScalars
{
	std::optional<double> alpha;
	std::optional<double> beta;
	std::optional<double> delta;
	std::optional<double> gamma;
	/// LOMR: singular 2x2 Gram system; an MR step was taken instead.
	bool gram_singular = false;
	/// LOMR: delta vanished, so the direction update ratio was undefined.
	bool delta_zero = false;
};

/// Coefficient matrix, preconditioner and derived products shared by a run.
struct Operators
{
	SparseMat A;
	SparseMat I;
	std::optional<SparseMat> Pi;
	/// Pi*A, assembled for PMR, PSD and NPCG.
	std::optional<SparseMat> PiA;
};

struct IterState
{
	Method method;
	std::shared_ptr<const Operators> ops;
	Index i = 0;
	SparseMat M;
	/// Unpreconditioned residual I - A*M.
	SparseMat R;
	/// Preconditioned residual Pi*R (preconditioned methods only).
	std::optional<SparseMat> Z;
	/// Search direction. For MR it is R, for PMR it is Z, for LO(P)MR it is the previous direction.
	SparseMat P;
	/// Gradient direction (NCG and NPCG).
	std::optional<SparseMat> G;
	/// (R,G) for N(P)CG, (R,Z) for PCG, ||R||^2 for CG.
	std::optional<double> last_rho;
	StepScalars last_scalars;

	Index order() const { return M.rows(); }
};

struct RunConfig
{
	Method method;
	Index max_iters = 100;
	/// Stop as soon as ||R||_F < res_tol.
	double res_tol = 0.0;
	/// Without dropping: stop once density(M) >= cap. With dropping: budget cap*n^2.
	double density_cap = 0.03;
	bool dropping_enabled = false;
	bool drop_search_direction = true;
	/// Stop as Stagnated when ||R||_F changed by less than stagnation_tol (relative)
	/// over this many iterations. 0 disables the check.
	Index stagnation_window = 10;
	double stagnation_tol = 1e-12;
	bool record_timing = true;

	/// Throws ConfigError on invalid fields.
	void validate() const;
};

struct IterRecord
{
	Index iter = 0;
	double res_norm = 0.0;
	double density_M = 0.0;
	double density_P = 0.0;
	StepScalars scalars;
	KernelCounts counts;
	/// SpGEMMs spent forming A*(I - A*M) for the dropping score (not part of counts).
	int drop_spgemm = 0;
	DropReport drop;
	std::int64_t wall_ns = 0;
};

enum class StopReason { Converged, MaxIters, DensityCap, Breakdown, Stagnated };

std::string stop_reason_name(StopReason r);

enum class SymmetryCheck { Error, Warn, Skip };

/// Relative asymmetry above which A (or Pi) is rejected.
inline constexpr double symmetry_tolerance = 1e-12;

/// Initial state R_0 = I - A*M0 and the method-specific direction and gradient.
/** precond must be non-null exactly when method.preconditioned is set. */
IterState init(Method method, const SparseMat& A, const SparseMat& M0,
               const SparseMat* precond = nullptr, SymmetryCheck check = SymmetryCheck::Error);

/// Advances the state by one iteration. Throws BreakdownError and leaves the state untouched.
IterRecord step(IterState& state, const RunConfig& cfg, const Dropper* dropper = nullptr);

/// Row describing the state without an iteration having been taken (iteration 0).
IterRecord initial_record(const IterState& state);

struct RunResult
{
	IterState state;
	std::vector<IterRecord> records; ///< records[0] describes the initial state
	StopReason reason = StopReason::MaxIters;
	std::string message;
};

using IterationObserver = std::function<void(const IterState&, const IterRecord&)>;

/// Drives step() until a stopping rule fires. Breakdowns are reported, not thrown.
RunResult run(const SparseMat& A, const SparseMat& M0, const SparseMat* precond,
              const RunConfig& cfg, const Dropper* dropper = nullptr,
              const IterationObserver& observer = {});

/// diag(A)^{-1}; throws std::invalid_argument naming the first zero diagonal row.
SparseMat jacobi(const SparseMat& A);

enum class InitialGuess { Zero, ScaledIdentity };

/// Zero matrix, or alpha*I with alpha = tr(A)/||A||_F^2 (the minimizer of ||I - alpha A||_F).
SparseMat initial_guess(const SparseMat& A, InitialGuess kind);

} // namespace spai

#endif
