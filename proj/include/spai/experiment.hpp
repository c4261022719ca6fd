/** \file
 * \brief Convergence logs and batch experiment plans.
 */

#ifndef SPAI_EXPERIMENT_HPP
#define SPAI_EXPERIMENT_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spai/matgen.hpp"
#include "spai/methods.hpp"
#include "spai/verify.hpp"

namespace spai {

inline constexpr std::string_view convergence_csv_header =
	"iter,res_fro,density_M,density_P,alpha,beta,delta,gamma,spgemm,spgeam,inner,norm,wall_ns";

inline constexpr std::string_view summary_csv_header =
	"matrix,method,lambda_min,lambda_max,res_fro,iters,density";

/// 17 significant digits; the shortest text that reads back to the same double.
std::string format_real(double v);

/// One data line (no newline). wall_ns is left empty when with_timing is false.
std::string convergence_csv_row(const IterRecord& rec, bool with_timing);
void write_convergence_csv(std::ostream& out, const std::vector<IterRecord>& records, bool with_timing);
void write_convergence_csv(const std::string& path, const std::vector<IterRecord>& records,
                           bool with_timing);

/// Right-hand side "ones" (b = A*1) or "random:<seed>".
std::vector<double> make_rhs(const SparseMat& A, std::string_view kind);

struct PlanMatrix
{
	std::string name;
	/// Exactly one of path and spec is set.
	std::optional<std::string> path;
	std::optional<MatrixSpec> spec;
};

struct ExperimentPlan
{
	std::string name = "experiment";
	std::string output_dir = ".";
	std::vector<MethodKind> methods;
	bool jacobi = false;
	Index max_iters = 100;
	double res_tol = 0.0;
	double density_cap = 0.03;
	bool drop = false;
	bool drop_direction = true;
	/// Solve with every k-th iterate as preconditioner; 0 disables.
	Index verify_every = 0;
	bool probe_spectrum = true;
	std::string rhs = "ones";
	double pcg_tol = 1e-6;
	Index pcg_maxit = 10000;
	bool timing = false;
	std::vector<PlanMatrix> matrices;

	/// Throws std::invalid_argument if the plan cannot run.
	void validate() const;
};

/// Parses the INI-like plan text. Relative matrix paths and output_dir resolve against base_dir.
ExperimentPlan parse_plan(std::string_view text, const std::string& base_dir = ".");
ExperimentPlan load_plan(const std::string& path);

struct CellFailure
{
	std::string matrix;
	std::string method;
	std::string message;
};

struct ExperimentOutcome
{
	std::vector<std::string> files;
	std::vector<CellFailure> failures;
};

/// Runs every (matrix, method) cell and writes the CSVs into plan.output_dir.
/** Failures of single cells are recorded in errors.csv and do not stop the run. */
ExperimentOutcome run_experiment(const ExperimentPlan& plan, std::ostream* progress = nullptr);

} // namespace spai

#endif
