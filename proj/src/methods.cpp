#include "spai/methods.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

namespace spai {

namespace {

/// Kernel front-end that tallies every call into a KernelCounts.
class Kernels
{
public:
	explicit Kernels(KernelCounts& counts) : counts_(counts) {}

	SparseMat gemm(const SparseMat& X, const SparseMat& Y)
	{
		++counts_.spgemm;
		return spgemm(X, Y);
	}
	SparseMat geam(double a, const SparseMat& X, double b, const SparseMat& Y)
	{
		++counts_.spgeam;
		return spgeam(a, X, b, Y);
	}
	double inner(const SparseMat& X, const SparseMat& Y)
	{
		++counts_.inner;
		return frob_inner(X, Y);
	}
	double norm_sq(const SparseMat& X)
	{
		++counts_.norm;
		return frob_norm_sq(X);
	}

private:
	KernelCounts& counts_;
};

bool usable(double x)
{
	return std::isfinite(x);
}

[[noreturn]] void breakdown(Method m, Index i, const std::string& what)
{
	std::ostringstream os;
	os << method_name(m) << " breakdown at iteration " << i << ": " << what;
	throw BreakdownError(os.str());
}

/// Quotient used as a step size; throws if the denominator cannot be used.
double checked_step(Method m, Index i, double num, double den, const char* what)
{
	if (!(den > 0.0) || !usable(den) || !usable(num))
		breakdown(m, i, std::string(what) + " = " + std::to_string(den));
	return num / den;
}

/// LOMR and LOPMR two-dimensional projection.
struct LoCoefficients
{
	double delta;
	double gamma;
	bool gram_singular = false;
};

/// Solves the 2x2 normal equations
///   [rr rp; rp pp] [delta; gamma] = [br; bp]
/// where rr = (AW,AW)-type products of the residual direction and pp those of the
/// previous direction. Falls back to the one-dimensional step when singular.
LoCoefficients lo_coefficients(Method m, Index i, double rr, double pp, double rp, double br,
                               double bp)
{
	if (!(rr > 0.0) || !usable(rr))
		breakdown(m, i, "residual direction has zero A-image");
	if (i == 0)
		return {br / rr, 1.0, false};
	const double c = rr * pp - rp * rp;
	const double scale = rr * pp;
	if (!(c > 64.0 * std::numeric_limits<double>::epsilon() * scale) || !usable(c))
		return {br / rr, 0.0, true};
	return {(pp * br - rp * bp) / c, (rr * bp - rp * br) / c, false};
}

/// Next direction P_i = W + (gamma/delta) P_{i-1} with the degenerate cases spelled out.
SparseMat lo_direction(Kernels& k, const SparseMat& W, const SparseMat& prev,
                       const LoCoefficients& co, StepScalars& sc)
{
	if (co.delta != 0.0)
		return k.geam(1.0, W, co.gamma / co.delta, prev);
	sc.delta_zero = true;
	if (co.gamma != 0.0)
		return prev;
	return W;
}

SparseMat explicit_residual(Kernels& k, const Operators& ops, const SparseMat& M)
{
	return k.geam(1.0, ops.I, -1.0, k.gemm(ops.A, M));
}

SparseMat explicit_precond_residual(Kernels& k, const Operators& ops, const SparseMat& M)
{
	return k.geam(1.0, *ops.Pi, -1.0, k.gemm(*ops.PiA, M));
}

/// Everything one step produces; committed to the state only on success.
struct StepOutput
{
	SparseMat M;
	SparseMat R;
	std::optional<SparseMat> Z;
	SparseMat P;
	std::optional<SparseMat> G;
	std::optional<double> rho;
	StepScalars scalars;
};

class Stepper
{
public:
	Stepper(const IterState& s, const RunConfig& cfg, const Dropper* dropper, IterRecord& rec)
		: s_(s), ops_(*s.ops), dropping_(cfg.dropping_enabled),
		  drop_dir_(cfg.dropping_enabled && cfg.drop_search_direction), dropper_(dropper),
		  rec_(rec), k_(rec.counts)
	{}

	StepOutput run()
	{
		const Method m = s_.method;
		switch (m.kind) {
		case MethodKind::MR: return m.preconditioned ? pmr() : mr();
		case MethodKind::SD: return m.preconditioned ? psd() : sd();
		case MethodKind::NCG: return m.preconditioned ? npcg() : ncg();
		case MethodKind::CG: return m.preconditioned ? pcg() : cg();
		case MethodKind::LOMR: return m.preconditioned ? lopmr() : lomr();
		}
		throw std::logic_error("unknown method");
	}

private:
	/// Main-iterate dropping; the dropper forms the score product itself when it fires.
	SparseMat drop_main(const SparseMat& Mn)
	{
		auto [dropped, report] = dropper_->main(Mn);
		rec_.drop.dropped_M = report.dropped_M;
		rec_.drop.purged_M = report.purged_M;
		rec_.drop.predicted_delta = report.predicted_delta;
		rec_.drop.fired = report.fired;
		rec_.drop_spgemm = report.score_spgemm;
		return std::move(dropped);
	}

	SparseMat maybe_drop_direction(SparseMat P)
	{
		if (!drop_dir_)
			return P;
		auto [dropped, report] = dropper_->direction(P);
		rec_.drop.dropped_P = report.dropped_P;
		return std::move(dropped);
	}

	StepOutput mr()
	{
		StepOutput out;
		const SparseMat AR = k_.gemm(ops_.A, s_.R);
		const double num = k_.inner(s_.R, AR);
		const double den = k_.norm_sq(AR);
		const double alpha = checked_step(s_.method, s_.i, num, den, "||AR||_F^2");
		out.scalars.alpha = alpha;
		out.M = k_.geam(1.0, s_.M, alpha, s_.R);
		if (dropping_) {
			out.M = drop_main(out.M);
			out.R = explicit_residual(k_, ops_, out.M);
		} else {
			out.R = k_.geam(1.0, s_.R, -alpha, AR);
		}
		out.P = out.R;
		return out;
	}

	StepOutput sd()
	{
		StepOutput out;
		const SparseMat AP = k_.gemm(ops_.A, s_.P);
		const double num = k_.inner(s_.R, AP);
		const double den = k_.norm_sq(AP);
		const double alpha = checked_step(s_.method, s_.i, num, den, "||AP||_F^2");
		out.scalars.alpha = alpha;
		out.M = k_.geam(1.0, s_.M, alpha, s_.P);
		if (dropping_) {
			out.M = drop_main(out.M);
			out.R = explicit_residual(k_, ops_, out.M);
		} else {
			out.R = k_.geam(1.0, s_.R, -alpha, AP);
		}
		out.P = maybe_drop_direction(k_.gemm(ops_.A, out.R));
		return out;
	}

	StepOutput ncg()
	{
		StepOutput out;
		const double rho = *s_.last_rho;
		const SparseMat AP = k_.gemm(ops_.A, s_.P);
		const double pap = k_.inner(s_.P, AP);
		const double alpha = checked_step(s_.method, s_.i, -rho, pap, "(P,AP)_F");
		out.scalars.alpha = alpha;
		out.M = k_.geam(1.0, s_.M, alpha, s_.P);
		if (dropping_) {
			out.M = drop_main(out.M);
			out.R = explicit_residual(k_, ops_, out.M);
		} else {
			out.R = k_.geam(1.0, s_.R, -alpha, AP);
		}
		out.G = scale(-1.0, k_.gemm(ops_.A, out.R));
		out.rho = k_.inner(out.R, *out.G);
		const double beta = *out.rho / rho;
		if (!usable(beta))
			breakdown(s_.method, s_.i, "(R,G)_F vanished");
		out.scalars.beta = beta;
		out.P = maybe_drop_direction(k_.geam(-1.0, *out.G, beta, s_.P));
		return out;
	}

	StepOutput cg()
	{
		StepOutput out;
		const double rho = *s_.last_rho;
		const SparseMat AP = k_.gemm(ops_.A, s_.P);
		const double pap = k_.inner(s_.P, AP);
		const double alpha = checked_step(s_.method, s_.i, rho, pap, "(P,AP)_F");
		out.scalars.alpha = alpha;
		out.M = k_.geam(1.0, s_.M, alpha, s_.P);
		if (dropping_) {
			out.M = drop_main(out.M);
			out.R = explicit_residual(k_, ops_, out.M);
		} else {
			out.R = k_.geam(1.0, s_.R, -alpha, AP);
		}
		out.rho = k_.norm_sq(out.R);
		const double beta = *out.rho / rho;
		if (!usable(beta))
			breakdown(s_.method, s_.i, "||R||_F vanished");
		out.scalars.beta = beta;
		out.P = maybe_drop_direction(k_.geam(1.0, out.R, beta, s_.P));
		return out;
	}

	StepOutput lomr()
	{
		StepOutput out;
		const SparseMat& prev = s_.P;
		const SparseMat AR = k_.gemm(ops_.A, s_.R);
		const SparseMat AP = k_.gemm(ops_.A, prev);
		const double r_ar = k_.inner(s_.R, AR);
		const double ar_ap = k_.inner(AR, AP);
		const double r_ap = k_.inner(s_.R, AP);
		const double ar2 = k_.norm_sq(AR);
		const double ap2 = k_.norm_sq(AP);
		const auto co = lo_coefficients(s_.method, s_.i, ar2, ap2, ar_ap, r_ar, r_ap);
		out.scalars.delta = co.delta;
		out.scalars.gamma = co.gamma;
		out.scalars.gram_singular = co.gram_singular;
		out.M = k_.geam(1.0, k_.geam(1.0, s_.M, co.delta, s_.R), co.gamma, prev);
		if (dropping_) {
			out.M = drop_main(out.M);
			out.R = explicit_residual(k_, ops_, out.M);
		} else {
			out.R = k_.geam(1.0, k_.geam(1.0, s_.R, -co.delta, AR), -co.gamma, AP);
		}
		out.P = maybe_drop_direction(lo_direction(k_, s_.R, prev, co, out.scalars));
		return out;
	}

	StepOutput pmr()
	{
		StepOutput out;
		const SparseMat& Z = *s_.Z;
		const SparseMat W = k_.gemm(*ops_.PiA, Z);
		const double num = k_.inner(Z, W);
		const double den = k_.norm_sq(W);
		const double alpha = checked_step(s_.method, s_.i, num, den, "||Pi A Z||_F^2");
		out.scalars.alpha = alpha;
		out.M = k_.geam(1.0, s_.M, alpha, Z);
		if (dropping_) {
			out.M = drop_main(out.M);
			out.Z = explicit_precond_residual(k_, ops_, out.M);
		} else {
			out.Z = k_.geam(1.0, Z, -alpha, W);
		}
		out.R = explicit_residual(k_, ops_, out.M);
		out.P = *out.Z;
		return out;
	}

	StepOutput psd()
	{
		StepOutput out;
		const SparseMat& Z = *s_.Z;
		const SparseMat W = k_.gemm(*ops_.PiA, s_.P);
		const double num = k_.inner(Z, W);
		const double den = k_.norm_sq(W);
		const double alpha = checked_step(s_.method, s_.i, num, den, "||Pi A P||_F^2");
		out.scalars.alpha = alpha;
		out.M = k_.geam(1.0, s_.M, alpha, s_.P);
		if (dropping_) {
			out.M = drop_main(out.M);
			out.Z = explicit_precond_residual(k_, ops_, out.M);
		} else {
			out.Z = k_.geam(1.0, Z, -alpha, W);
		}
		out.P = maybe_drop_direction(k_.gemm(*ops_.PiA, *out.Z));
		out.R = explicit_residual(k_, ops_, out.M);
		return out;
	}

	StepOutput npcg()
	{
		StepOutput out;
		const double rho = *s_.last_rho;
		const SparseMat AP = k_.gemm(ops_.A, s_.P);
		const double pap = k_.inner(s_.P, AP);
		const double alpha = checked_step(s_.method, s_.i, -rho, pap, "(P,AP)_F");
		out.scalars.alpha = alpha;
		out.M = k_.geam(1.0, s_.M, alpha, s_.P);
		if (dropping_) {
			out.M = drop_main(out.M);
			out.R = explicit_residual(k_, ops_, out.M);
		} else {
			out.R = k_.geam(1.0, s_.R, -alpha, AP);
		}
		out.Z = k_.gemm(*ops_.Pi, out.R);
		out.G = scale(-1.0, k_.gemm(*ops_.PiA, *out.Z));
		out.rho = k_.inner(out.R, *out.G);
		const double beta = *out.rho / rho;
		if (!usable(beta))
			breakdown(s_.method, s_.i, "(R,G)_F vanished");
		out.scalars.beta = beta;
		out.P = maybe_drop_direction(k_.geam(-1.0, *out.G, beta, s_.P));
		return out;
	}

	StepOutput pcg()
	{
		StepOutput out;
		const double rho = *s_.last_rho;
		const SparseMat AP = k_.gemm(ops_.A, s_.P);
		const double pap = k_.inner(s_.P, AP);
		const double alpha = checked_step(s_.method, s_.i, rho, pap, "(P,AP)_F");
		out.scalars.alpha = alpha;
		out.M = k_.geam(1.0, s_.M, alpha, s_.P);
		if (dropping_) {
			out.M = drop_main(out.M);
			out.R = explicit_residual(k_, ops_, out.M);
		} else {
			out.R = k_.geam(1.0, s_.R, -alpha, AP);
		}
		out.Z = k_.gemm(*ops_.Pi, out.R);
		out.rho = k_.inner(out.R, *out.Z);
		const double beta = *out.rho / rho;
		if (!usable(beta))
			breakdown(s_.method, s_.i, "(R,Z)_F vanished");
		out.scalars.beta = beta;
		out.P = maybe_drop_direction(k_.geam(1.0, *out.Z, beta, s_.P));
		return out;
	}

	StepOutput lopmr()
	{
		StepOutput out;
		const SparseMat& Z = *s_.Z;
		const SparseMat& prev = s_.P;
		const SparseMat AZ = k_.gemm(ops_.A, Z);
		const SparseMat AP = k_.gemm(ops_.A, prev);
		const SparseMat PiAZ = k_.gemm(*ops_.Pi, AZ);
		const SparseMat PiAP = k_.gemm(*ops_.Pi, AP);
		const double zz = k_.inner(AZ, PiAZ);
		const double pp = k_.inner(AP, PiAP);
		const double zp = k_.inner(AZ, PiAP);
		const double z_az = k_.inner(Z, AZ);
		const double z_ap = k_.inner(Z, AP);
		const auto co = lo_coefficients(s_.method, s_.i, zz, pp, zp, z_az, z_ap);
		out.scalars.delta = co.delta;
		out.scalars.gamma = co.gamma;
		out.scalars.gram_singular = co.gram_singular;
		out.M = k_.geam(1.0, k_.geam(1.0, s_.M, co.delta, Z), co.gamma, prev);
		if (dropping_) {
			out.M = drop_main(out.M);
			out.R = explicit_residual(k_, ops_, out.M);
		} else {
			out.R = k_.geam(1.0, k_.geam(1.0, s_.R, -co.delta, AZ), -co.gamma, AP);
		}
		out.P = maybe_drop_direction(lo_direction(k_, Z, prev, co, out.scalars));
		out.Z = k_.gemm(*ops_.Pi, out.R);
		return out;
	}

	const IterState& s_;
	const Operators& ops_;
	bool dropping_;
	bool drop_dir_;
	const Dropper* dropper_;
	IterRecord& rec_;
	Kernels k_;
};

void check_symmetric(const SparseMat& X, const char* name, SymmetryCheck check)
{
	if (check == SymmetryCheck::Skip)
		return;
	const double asym = asymmetry(X);
	if (asym <= symmetry_tolerance)
		return;
	std::ostringstream os;
	os << name << " is not symmetric (relative asymmetry " << asym << ")";
	if (check == SymmetryCheck::Error)
		throw ConfigError(os.str());
	std::cerr << "warning: " << os.str() << "\n";
}

IterRecord make_record(const IterState& s)
{
	IterRecord rec;
	rec.iter = s.i;
	rec.res_norm = frob_norm(s.R);
	rec.density_M = density(s.M);
	rec.density_P = density(s.P);
	rec.scalars = s.last_scalars;
	return rec;
}

} // namespace

std::string method_name(Method m)
{
	switch (m.kind) {
	case MethodKind::MR: return m.preconditioned ? "PMR" : "MR";
	case MethodKind::SD: return m.preconditioned ? "PSD" : "SD";
	case MethodKind::NCG: return m.preconditioned ? "NPCG" : "NCG";
	case MethodKind::CG: return m.preconditioned ? "PCG" : "CG";
	case MethodKind::LOMR: return m.preconditioned ? "LOPMR" : "LOMR";
	}
	return "?";
}

std::string method_token(MethodKind k)
{
	switch (k) {
	case MethodKind::MR: return "mr";
	case MethodKind::SD: return "sd";
	case MethodKind::NCG: return "ncg";
	case MethodKind::CG: return "cg";
	case MethodKind::LOMR: return "lomr";
	}
	return "?";
}

MethodKind parse_method_kind(std::string_view token)
{
	for (const MethodKind k : all_method_kinds)
		if (token == method_token(k))
			return k;
	throw std::invalid_argument("unknown method '" + std::string(token)
	                            + "' (expected mr, sd, ncg, cg or lomr)");
}

std::string stop_reason_name(StopReason r)
{
	switch (r) {
	case StopReason::Converged: return "Converged";
	case StopReason::MaxIters: return "MaxIters";
	case StopReason::DensityCap: return "DensityCap";
	case StopReason::Breakdown: return "Breakdown";
	case StopReason::Stagnated: return "Stagnated";
	}
	return "?";
}

void RunConfig::validate() const
{
	if (max_iters < 1)
		throw ConfigError("max_iters must be at least 1");
	if (!(density_cap > 0.0 && density_cap <= 1.0))
		throw ConfigError("density_cap must lie in (0, 1]");
	if (!(res_tol >= 0.0))
		throw ConfigError("res_tol must be non-negative");
	if (stagnation_window < 0)
		throw ConfigError("stagnation_window must be non-negative");
}

IterState init(Method method, const SparseMat& A, const SparseMat& M0, const SparseMat* precond,
               SymmetryCheck check)
{
	if (!A.is_square())
		throw DimensionError("init: A is not square");
	const Index n = A.rows();
	if (M0.rows() != n || M0.cols() != n)
		throw DimensionError("init: M0 must be square of the same order as A");
	if (method.preconditioned && precond == nullptr)
		throw ConfigError("init: " + method_name(method) + " requires a preconditioner");
	if (!method.preconditioned && precond != nullptr)
		throw ConfigError("init: " + method_name(method) + " does not take a preconditioner");
	if (precond && (precond->rows() != n || precond->cols() != n))
		throw DimensionError("init: preconditioner must be square of the same order as A");
	check_symmetric(A, "A", check);
	if (precond)
		check_symmetric(*precond, "preconditioner", check);

	auto ops = std::make_shared<Operators>();
	ops->A = A;
	ops->I = identity(n);
	if (precond) {
		ops->Pi = *precond;
		if (method.kind == MethodKind::MR || method.kind == MethodKind::SD
		    || method.kind == MethodKind::NCG)
			ops->PiA = spgemm(*precond, A);
	}

	IterState s;
	s.method = method;
	s.ops = ops;
	s.M = M0;
	s.R = spgeam(1.0, ops->I, -1.0, spgemm(A, M0));

	switch (method.kind) {
	case MethodKind::MR:
		if (method.preconditioned) {
			s.Z = spgeam(1.0, *ops->Pi, -1.0, spgemm(*ops->PiA, M0));
			s.P = *s.Z;
		} else {
			s.P = s.R;
		}
		break;
	case MethodKind::SD:
		if (method.preconditioned) {
			s.Z = spgeam(1.0, *ops->Pi, -1.0, spgemm(*ops->PiA, M0));
			s.P = spgemm(*ops->PiA, *s.Z);
		} else {
			s.P = spgemm(A, s.R);
		}
		break;
	case MethodKind::NCG:
		if (method.preconditioned) {
			s.Z = spgemm(*ops->Pi, s.R);
			s.G = scale(-1.0, spgemm(*ops->PiA, *s.Z));
		} else {
			s.G = scale(-1.0, spgemm(A, s.R));
		}
		s.P = scale(-1.0, *s.G);
		s.last_rho = frob_inner(s.R, *s.G);
		break;
	case MethodKind::CG:
		if (method.preconditioned) {
			s.Z = spgemm(*ops->Pi, s.R);
			s.P = *s.Z;
			s.last_rho = frob_inner(s.R, *s.Z);
		} else {
			s.P = s.R;
			s.last_rho = frob_norm_sq(s.R);
		}
		break;
	case MethodKind::LOMR:
		if (method.preconditioned)
			s.Z = spgemm(*ops->Pi, s.R);
		s.P = SparseMat::zeros(n, n);
		break;
	}
	return s;
}

IterRecord step(IterState& state, const RunConfig& cfg, const Dropper* dropper)
{
	if (!state.ops)
		throw ConfigError("step: state is not initialized");
	if (cfg.dropping_enabled && dropper == nullptr)
		throw ConfigError("step: dropping is enabled but no dropper was supplied");

	IterRecord rec;
	const auto t0 = std::chrono::steady_clock::now();
	StepOutput out = Stepper(state, cfg, dropper, rec).run();

	state.M = std::move(out.M);
	state.R = std::move(out.R);
	state.P = std::move(out.P);
	if (out.Z)
		state.Z = std::move(out.Z);
	if (out.G)
		state.G = std::move(out.G);
	if (out.rho)
		state.last_rho = out.rho;
	state.last_scalars = out.scalars;
	++state.i;
	const auto t1 = std::chrono::steady_clock::now();

	IterRecord full = make_record(state);
	full.counts = rec.counts;
	full.drop_spgemm = rec.drop_spgemm;
	full.drop = rec.drop;
	if (cfg.record_timing)
		full.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
	return full;
}

IterRecord initial_record(const IterState& state)
{
	return make_record(state);
}

RunResult run(const SparseMat& A, const SparseMat& M0, const SparseMat* precond,
              const RunConfig& cfg, const Dropper* dropper, const IterationObserver& observer)
{
	cfg.validate();
	std::optional<Dropper> own;
	if (cfg.dropping_enabled && dropper == nullptr) {
		own.emplace(A, drop_config_for(A.rows(), cfg.density_cap));
		dropper = &*own;
	}

	RunResult result{init(cfg.method, A, M0, precond), {}, StopReason::MaxIters, {}};
	result.records.push_back(initial_record(result.state));
	if (observer)
		observer(result.state, result.records.back());

	const auto converged = [&](double res) { return res == 0.0 || res < cfg.res_tol; };
	if (converged(result.records.back().res_norm)) {
		result.reason = StopReason::Converged;
		return result;
	}

	while (result.state.i < cfg.max_iters) {
		try {
			result.records.push_back(step(result.state, cfg, dropper));
		} catch (const BreakdownError& e) {
			result.reason = StopReason::Breakdown;
			result.message = e.what();
			return result;
		}
		const IterRecord& rec = result.records.back();
		if (observer)
			observer(result.state, rec);
		if (!std::isfinite(rec.res_norm)) {
			result.reason = StopReason::Breakdown;
			result.message = "residual norm is not finite";
			return result;
		}
		if (converged(rec.res_norm)) {
			result.reason = StopReason::Converged;
			return result;
		}
		if (!cfg.dropping_enabled && rec.density_M >= cfg.density_cap) {
			result.reason = StopReason::DensityCap;
			return result;
		}
		const auto w = static_cast<std::size_t>(cfg.stagnation_window);
		if (w > 0 && result.records.size() > w) {
			const double then = result.records[result.records.size() - 1 - w].res_norm;
			if (std::fabs(then - rec.res_norm) <= cfg.stagnation_tol * then) {
				result.reason = StopReason::Stagnated;
				return result;
			}
		}
	}
	result.reason = StopReason::MaxIters;
	return result;
}

SparseMat jacobi(const SparseMat& A)
{
	if (!A.is_square())
		throw DimensionError("jacobi: matrix is not square");
	std::vector<double> d = diagonal(A);
	for (std::size_t k = 0; k < d.size(); ++k) {
		if (d[k] == 0.0)
			throw std::invalid_argument("jacobi: zero diagonal entry in row " + std::to_string(k));
		d[k] = 1.0 / d[k];
	}
	return diagonal_matrix(d);
}

SparseMat initial_guess(const SparseMat& A, InitialGuess kind)
{
	if (!A.is_square())
		throw DimensionError("initial_guess: matrix is not square");
	if (kind == InitialGuess::Zero)
		return SparseMat::zeros(A.rows(), A.cols());
	double trace = 0.0;
	for (const double d : diagonal(A))
		trace += d;
	const double nrm2 = frob_norm_sq(A);
	if (!(nrm2 > 0.0))
		throw std::invalid_argument("initial_guess: A is zero");
	return scale(trace / nrm2, identity(A.rows()));
}

} // namespace spai
