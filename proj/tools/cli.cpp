#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "spai/experiment.hpp"
#include "spai/matgen.hpp"
#include "spai/methods.hpp"
#include "spai/mmio.hpp"
#include "spai/verify.hpp"
#include "atomic_file.hpp"

namespace spai::cli {

namespace {

/// Error caused by a bad flag value; the message starts with the flag name.
class UsageError : public std::invalid_argument
{
public:
	using std::invalid_argument::invalid_argument;
};

std::pair<double, double> parse_range(const std::string& flag, const std::string& text)
{
	const auto comma = text.find(',');
	if (comma == std::string::npos)
		throw UsageError(flag + ": expected LOW,HIGH, got '" + text + "'");
	const std::string a = text.substr(0, comma);
	const std::string b = text.substr(comma + 1);
	char* ea = nullptr;
	char* eb = nullptr;
	const double lo = std::strtod(a.c_str(), &ea);
	const double hi = std::strtod(b.c_str(), &eb);
	if (a.empty() || b.empty() || *ea != '\0' || *eb != '\0')
		throw UsageError(flag + ": expected LOW,HIGH, got '" + text + "'");
	if (!(lo < hi))
		throw UsageError(flag + ": low end " + a + " must be below high end " + b);
	return {lo, hi};
}

struct GenArgs
{
	std::string family;
	Index n = 0;
	Index k = 0;
	std::string eig_range;
	std::string offdiag_range;
	Index bandwidth = 1;
	Index nnz = 0;
	Index nx = 0;
	Index ny = 0;
	std::uint64_t seed = 0;
	std::string out;
	std::string spec_file;
};

struct SpaiArgs
{
	std::string matrix;
	std::string method;
	std::string precond = "none";
	Index max_iters = 100;
	double res_tol = 0.0;
	double density_cap = 0.03;
	bool drop = false;
	bool drop_direction = true;
	Index stagnation_window = 10;
	double stagnation_tol = 1e-12;
	std::string out;
	std::string log;
	bool check_spd = false;
	std::string m0 = "zero";
	bool no_timing = false;
};

struct VerifyArgs
{
	std::string matrix;
	std::string spai;
	double tol = 1e-6;
	Index maxit = 10000;
	std::string rhs = "ones";
	bool probe = false;
	std::string csv;
};

struct ExperimentArgs
{
	std::string plan;
	bool quiet = false;
};

int cmd_gen(const GenArgs& g, const CLI::App& sub, std::ostream& out)
{
	MatrixSpec s;
	if (!g.spec_file.empty()) {
		std::ifstream in(g.spec_file);
		if (!in)
			throw UsageError("--spec: cannot open '" + g.spec_file + "'");
		std::ostringstream ss;
		ss << in.rdbuf();
		s = spec_from_key_values(ss.str());
	} else if (g.family.empty()) {
		throw UsageError("--family: required unless --spec is given");
	}
	if (!g.family.empty())
		s.family = parse_family(g.family);
	if (sub.count("--n"))
		s.n = g.n;
	if (sub.count("--k"))
		s.k_distinct = g.k;
	if (sub.count("--eig-range"))
		std::tie(s.eig_low, s.eig_high) = parse_range("--eig-range", g.eig_range);
	if (sub.count("--offdiag-range"))
		std::tie(s.offdiag_low, s.offdiag_high) = parse_range("--offdiag-range", g.offdiag_range);
	if (sub.count("--bandwidth"))
		s.bandwidth = g.bandwidth;
	if (sub.count("--nnz"))
		s.nnz_target = g.nnz;
	if (sub.count("--nx"))
		s.nx = g.nx;
	if (sub.count("--ny"))
		s.ny = g.ny;
	if (sub.count("--seed"))
		s.seed = g.seed;

	const SparseMat A = gen(s);
	write_mm(A, g.out, true);
	out << "wrote " << g.out << ": n = " << A.rows() << ", nnz = " << A.nnz() << "\n";
	return ok;
}

int exit_for(StopReason r)
{
	switch (r) {
	case StopReason::Breakdown: return breakdown;
	case StopReason::Stagnated: return stagnated;
	default: return ok;
	}
}

int cmd_spai(const SpaiArgs& a, std::ostream& out, std::ostream& err)
{
	const SparseMat A = read_mm(a.matrix);
	if (a.precond != "none" && a.precond != "jacobi")
		throw UsageError("--precond: expected none or jacobi, got '" + a.precond + "'");
	if (a.m0 != "zero" && a.m0 != "scaled")
		throw UsageError("--m0: expected zero or scaled, got '" + a.m0 + "'");

	RunConfig cfg;
	cfg.method = Method{parse_method_kind(a.method), a.precond == "jacobi"};
	cfg.max_iters = a.max_iters;
	cfg.res_tol = a.res_tol;
	cfg.density_cap = a.density_cap;
	cfg.dropping_enabled = a.drop;
	cfg.drop_search_direction = a.drop_direction;
	cfg.stagnation_window = a.stagnation_window;
	cfg.stagnation_tol = a.stagnation_tol;
	cfg.record_timing = !a.no_timing;
	cfg.validate();

	if (a.check_spd) {
		const SpectralProbe p = spectral_probe(A);
		out << "lambda_min(A) = " << format_real(p.lambda_min_est)
		    << ", lambda_max(A) = " << format_real(p.lambda_max_est) << "\n";
		if (!p.is_spd) {
			err << "error: " << a.matrix << " is not positive definite\n";
			return failure;
		}
	}

	std::optional<SparseMat> Pi;
	if (cfg.method.preconditioned)
		Pi = jacobi(A);
	const SparseMat M0 = initial_guess(A, a.m0 == "scaled" ? InitialGuess::ScaledIdentity
	                                                       : InitialGuess::Zero);
	const RunResult res = run(A, M0, Pi ? &*Pi : nullptr, cfg);
	const IterRecord& last = res.records.back();

	if (!a.log.empty())
		write_convergence_csv(a.log, res.records, cfg.record_timing);
	if (!a.out.empty())
		write_mm(res.state.M, a.out, false);

	out << method_name(cfg.method) << ": " << stop_reason_name(res.reason) << " after "
	    << last.iter << " iterations, ||I - AM||_F = " << format_real(last.res_norm)
	    << ", density(M) = " << format_real(last.density_M) << "\n";
	if (!res.message.empty())
		err << res.message << "\n";
	return exit_for(res.reason);
}

int cmd_verify(const VerifyArgs& v, std::ostream& out)
{
	const SparseMat A = read_mm(v.matrix);
	std::optional<SparseMat> M;
	if (!v.spai.empty())
		M = read_mm(v.spai);
	const std::vector<double> b = make_rhs(A, v.rhs);

	const SolveReport plain = linear_pcg(A, b, nullptr, v.tol, v.maxit);
	out << "cg iterations: " << plain.iterations << (plain.converged ? "" : " (not converged)") << "\n";
	std::optional<SolveReport> pre;
	if (M) {
		pre = linear_pcg(A, b, &*M, v.tol, v.maxit);
		out << "pcg iterations: " << pre->iterations << (pre->converged ? "" : " (not converged)")
		    << "\n";
		if (v.probe) {
			const SpectralProbe p = spectral_probe(*M);
			out << "lambda_min(M) = " << format_real(p.lambda_min_est)
			    << ", lambda_max(M) = " << format_real(p.lambda_max_est)
			    << ", spd: " << (p.is_spd ? "yes" : "no")
			    << (p.converged ? "" : " (estimate not converged)") << "\n";
		}
	} else if (v.probe) {
		throw UsageError("--probe-spectrum: requires --spai");
	}

	if (!v.csv.empty()) {
		detail::write_atomically(v.csv, [&](std::ostream& o) {
			o << "solver,iter,backward_error\n";
			const auto dump = [&](const char* name, const SolveReport& r) {
				for (std::size_t i = 0; i < r.backward_errors.size(); ++i)
					o << name << ',' << (i + 1) << ',' << format_real(r.backward_errors[i]) << '\n';
			};
			dump("cg", plain);
			if (pre)
				dump("pcg", *pre);
		});
	}
	return ok;
}

int cmd_experiment(const ExperimentArgs& e, std::ostream& out)
{
	const ExperimentPlan plan = load_plan(e.plan);
	const ExperimentOutcome res = run_experiment(plan, e.quiet ? nullptr : &out);
	out << "wrote " << res.files.size() << " files to " << plan.output_dir << "\n";
	if (!res.failures.empty()) {
		out << res.failures.size() << " cell(s) failed, see errors.csv\n";
		return failure;
	}
	return ok;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
	CLI::App app{"Sparse approximate inverses of SPD matrices by global iterations", "spai"};
	app.require_subcommand(1);

	GenArgs g;
	auto* gen_cmd = app.add_subcommand("gen", "Generate a test matrix");
	gen_cmd->add_option("--family", g.family, "tri-eigs, banded-eigs, rand-pattern, poisson2d, wathen");
	gen_cmd->add_option("--n", g.n, "Order");
	gen_cmd->add_option("--k", g.k, "Planted diagonal entries of L");
	gen_cmd->add_option("--eig-range", g.eig_range, "LOW,HIGH of the planted entries");
	gen_cmd->add_option("--offdiag-range", g.offdiag_range, "LOW,HIGH of the off-diagonal entries of L");
	gen_cmd->add_option("--bandwidth", g.bandwidth, "Lower bandwidth of L");
	gen_cmd->add_option("--nnz", g.nnz, "Strictly lower entries of L");
	gen_cmd->add_option("--nx", g.nx, "Grid width");
	gen_cmd->add_option("--ny", g.ny, "Grid height");
	gen_cmd->add_option("--seed", g.seed, "Random seed");
	gen_cmd->add_option("--spec", g.spec_file, "key=value spec file; flags override its fields");
	gen_cmd->add_option("--out", g.out, "Output .mtx")->required();

	SpaiArgs s;
	auto* spai_cmd = app.add_subcommand("spai", "Compute a sparse approximate inverse");
	spai_cmd->add_option("--matrix", s.matrix, "Input .mtx")->required();
	spai_cmd->add_option("--method", s.method, "mr, sd, ncg, cg, lomr")->required();
	spai_cmd->add_option("--precond", s.precond, "none or jacobi")->capture_default_str();
	spai_cmd->add_option("--max-iters", s.max_iters)->capture_default_str();
	spai_cmd->add_option("--res-tol", s.res_tol)->capture_default_str();
	spai_cmd->add_option("--density-cap", s.density_cap)->capture_default_str();
	spai_cmd->add_flag("--drop,!--no-drop", s.drop, "Enable dropping")->capture_default_str();
	spai_cmd->add_flag("--drop-direction,!--no-drop-direction", s.drop_direction,
	                   "Also drop search-direction entries")
		->capture_default_str();
	spai_cmd->add_option("--stagnation-window", s.stagnation_window, "0 disables")->capture_default_str();
	spai_cmd->add_option("--stagnation-tol", s.stagnation_tol, "Relative change counted as no progress")
		->capture_default_str();
	spai_cmd->add_option("--out", s.out, "Output .mtx for M");
	spai_cmd->add_option("--log", s.log, "Convergence CSV");
	spai_cmd->add_flag("--check-spd", s.check_spd, "Probe the spectrum of A first");
	spai_cmd->add_option("--m0", s.m0, "zero or scaled")->capture_default_str();
	spai_cmd->add_flag("--no-timing", s.no_timing, "Leave wall_ns empty");

	VerifyArgs v;
	auto* verify_cmd = app.add_subcommand("verify", "Judge an approximate inverse as a CG preconditioner");
	verify_cmd->add_option("--matrix", v.matrix, "Input .mtx")->required();
	verify_cmd->add_option("--spai", v.spai, "Approximate inverse .mtx");
	verify_cmd->add_option("--tol", v.tol, "Backward error target")->capture_default_str();
	verify_cmd->add_option("--maxit", v.maxit)->capture_default_str();
	verify_cmd->add_option("--rhs", v.rhs, "ones or random:SEED")->capture_default_str();
	verify_cmd->add_flag("--probe-spectrum", v.probe, "Report extreme eigenvalues of the SPAI");
	verify_cmd->add_option("--csv", v.csv, "Backward-error history CSV");

	ExperimentArgs e;
	auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment plan");
	exp_cmd->add_option("plan", e.plan, "Plan file")->required();
	exp_cmd->add_flag("--quiet", e.quiet);

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& pe) {
		return app.exit(pe, out, err);
	}

	try {
		if (*gen_cmd)
			return cmd_gen(g, *gen_cmd, out);
		if (*spai_cmd)
			return cmd_spai(s, out, err);
		if (*verify_cmd)
			return cmd_verify(v, out);
		if (*exp_cmd)
			return cmd_experiment(e, out);
	} catch (const std::exception& ex) {
		err << "error: " << ex.what() << "\n";
		return failure;
	}
	return failure;
}

int run_cli(int argc, const char* const* argv)
{
	return run_cli(argc, argv, std::cout, std::cerr);
}

} // namespace spai::cli
