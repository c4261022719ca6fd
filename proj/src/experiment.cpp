#include "spai/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "atomic_file.hpp"
#include "spai/mmio.hpp"

namespace spai {

namespace fs = std::filesystem;

namespace {

std::string opt_real(const std::optional<double>& v)
{
	return v ? format_real(*v) : std::string();
}

std::string trim(std::string_view s)
{
	const auto b = s.find_first_not_of(" \t\r");
	if (b == std::string_view::npos)
		return {};
	const auto e = s.find_last_not_of(" \t\r");
	return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep)
{
	std::vector<std::string> parts;
	std::size_t start = 0;
	for (;;) {
		const auto p = s.find(sep, start);
		parts.push_back(trim(s.substr(start, p == std::string_view::npos ? s.npos : p - start)));
		if (p == std::string_view::npos)
			return parts;
		start = p + 1;
	}
}

[[noreturn]] void plan_error(std::size_t line, const std::string& what)
{
	throw std::invalid_argument("plan line " + std::to_string(line) + ": " + what);
}

bool parse_bool(std::size_t line, const std::string& key, const std::string& v)
{
	if (v == "true" || v == "yes" || v == "on" || v == "1")
		return true;
	if (v == "false" || v == "no" || v == "off" || v == "0")
		return false;
	plan_error(line, key + " expects true or false, got '" + v + "'");
}

double parse_real(std::size_t line, const std::string& key, const std::string& v)
{
	char* end = nullptr;
	const double d = std::strtod(v.c_str(), &end);
	if (v.empty() || end != v.c_str() + v.size())
		plan_error(line, key + " expects a number, got '" + v + "'");
	return d;
}

Index parse_index(std::size_t line, const std::string& key, const std::string& v)
{
	Index x = 0;
	const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
	if (ec != std::errc() || p != v.data() + v.size())
		plan_error(line, key + " expects an integer, got '" + v + "'");
	return x;
}

fs::path resolve(const std::string& base, const std::string& p)
{
	const fs::path path(p);
	return path.is_absolute() ? path : fs::path(base) / path;
}

} // namespace

std::string format_real(double v)
{
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.17g", v);
	return buf;
}

std::string convergence_csv_row(const IterRecord& r, bool with_timing)
{
	std::ostringstream os;
	os << r.iter << ',' << format_real(r.res_norm) << ',' << format_real(r.density_M) << ','
	   << format_real(r.density_P) << ',' << opt_real(r.scalars.alpha) << ','
	   << opt_real(r.scalars.beta) << ',' << opt_real(r.scalars.delta) << ','
	   << opt_real(r.scalars.gamma) << ',' << r.counts.spgemm << ',' << r.counts.spgeam << ','
	   << r.counts.inner << ',' << r.counts.norm << ',';
	if (with_timing)
		os << r.wall_ns;
	return os.str();
}

void write_convergence_csv(std::ostream& out, const std::vector<IterRecord>& records, bool with_timing)
{
	out << convergence_csv_header << '\n';
	for (const auto& r : records)
		out << convergence_csv_row(r, with_timing) << '\n';
}

void write_convergence_csv(const std::string& path, const std::vector<IterRecord>& records,
                           bool with_timing)
{
	detail::write_atomically(path, [&](std::ostream& out) {
		write_convergence_csv(out, records, with_timing);
	});
}

std::vector<double> make_rhs(const SparseMat& A, std::string_view kind)
{
	const auto n = static_cast<std::size_t>(A.rows());
	if (kind == "ones")
		return matvec(A, std::vector<double>(n, 1.0));
	constexpr std::string_view prefix = "random:";
	if (kind.substr(0, prefix.size()) == prefix) {
		const std::string_view s = kind.substr(prefix.size());
		std::uint64_t seed = 0;
		const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
		if (s.empty() || ec != std::errc() || p != s.data() + s.size())
			throw std::invalid_argument("rhs: bad seed in '" + std::string(kind) + "'");
		CounterRng rng(seed, 0);
		std::vector<double> b(n);
		for (auto& v : b)
			v = rng.uniform(-1.0, 1.0);
		return b;
	}
	throw std::invalid_argument("rhs must be 'ones' or 'random:<seed>', got '" + std::string(kind) + "'");
}

void ExperimentPlan::validate() const
{
	if (methods.empty())
		throw std::invalid_argument("plan: at least one method is required");
	if (matrices.empty())
		throw std::invalid_argument("plan: at least one [matrix] section is required");
	if (verify_every < 0)
		throw std::invalid_argument("plan: verify_every must be non-negative");
	std::vector<std::string> names;
	for (const auto& m : matrices)
		names.push_back(m.name);
	std::sort(names.begin(), names.end());
	if (std::adjacent_find(names.begin(), names.end()) != names.end())
		throw std::invalid_argument("plan: duplicate matrix names");
	RunConfig probe;
	probe.max_iters = max_iters;
	probe.res_tol = res_tol;
	probe.density_cap = density_cap;
	probe.validate();
	(void)make_rhs(SparseMat::zeros(0, 0), rhs);
}

ExperimentPlan parse_plan(std::string_view text, const std::string& base_dir)
{
	ExperimentPlan plan;
	std::string output = ".";
	std::istringstream in{std::string(text)};
	std::string raw;
	std::size_t lineno = 0;
	enum class Section { None, Experiment, Matrix } section = Section::None;
	std::map<std::string, std::string> kv;
	std::string mname;
	bool have_experiment = false;

	const auto flush_matrix = [&](std::size_t line) {
		if (section != Section::Matrix)
			return;
		PlanMatrix m;
		m.name = mname;
		if (const auto it = kv.find("path"); it != kv.end()) {
			if (kv.size() != 1)
				plan_error(line, "matrix '" + mname + "' mixes path with generator keys");
			m.path = resolve(base_dir, it->second).string();
		} else {
			m.spec = spec_from_map(kv);
		}
		plan.matrices.push_back(std::move(m));
		kv.clear();
	};

	while (std::getline(in, raw)) {
		++lineno;
		const std::string line = trim(raw);
		if (line.empty() || line.front() == '#' || line.front() == ';')
			continue;
		if (line.front() == '[') {
			if (line.back() != ']')
				plan_error(lineno, "unterminated section header");
			flush_matrix(lineno);
			const std::string head = trim(std::string_view(line).substr(1, line.size() - 2));
			if (head == "experiment") {
				if (have_experiment)
					plan_error(lineno, "duplicate [experiment] section");
				have_experiment = true;
				section = Section::Experiment;
			} else if (head.rfind("matrix", 0) == 0) {
				mname = trim(std::string_view(head).substr(6));
				if (mname.empty())
					plan_error(lineno, "matrix section needs a name");
				if (mname.find_first_of("/\\,") != std::string::npos)
					plan_error(lineno, "matrix name '" + mname + "' contains a path separator or comma");
				section = Section::Matrix;
			} else {
				plan_error(lineno, "unknown section [" + head + "]");
			}
			continue;
		}
		const auto eq = line.find('=');
		if (eq == std::string::npos)
			plan_error(lineno, "expected key = value");
		const std::string key = trim(std::string_view(line).substr(0, eq));
		const std::string value = trim(std::string_view(line).substr(eq + 1));
		if (section == Section::None)
			plan_error(lineno, "key outside of a section");
		if (section == Section::Matrix) {
			kv[key] = value;
			continue;
		}
		if (key == "name")
			plan.name = value;
		else if (key == "output")
			output = value;
		else if (key == "methods") {
			for (const auto& tok : split(value, ','))
				plan.methods.push_back(parse_method_kind(tok));
		} else if (key == "precond") {
			if (value != "none" && value != "jacobi")
				plan_error(lineno, "precond must be none or jacobi");
			plan.jacobi = value == "jacobi";
		} else if (key == "max_iters")
			plan.max_iters = parse_index(lineno, key, value);
		else if (key == "res_tol")
			plan.res_tol = parse_real(lineno, key, value);
		else if (key == "density_cap")
			plan.density_cap = parse_real(lineno, key, value);
		else if (key == "drop")
			plan.drop = parse_bool(lineno, key, value);
		else if (key == "drop_direction")
			plan.drop_direction = parse_bool(lineno, key, value);
		else if (key == "verify_every")
			plan.verify_every = parse_index(lineno, key, value);
		else if (key == "probe_spectrum")
			plan.probe_spectrum = parse_bool(lineno, key, value);
		else if (key == "rhs")
			plan.rhs = value;
		else if (key == "pcg_tol")
			plan.pcg_tol = parse_real(lineno, key, value);
		else if (key == "pcg_maxit")
			plan.pcg_maxit = parse_index(lineno, key, value);
		else if (key == "timing")
			plan.timing = parse_bool(lineno, key, value);
		else
			plan_error(lineno, "unknown key '" + key + "'");
	}
	flush_matrix(lineno);
	plan.output_dir = resolve(base_dir, output).string();
	plan.validate();
	return plan;
}

ExperimentPlan load_plan(const std::string& path)
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot open plan '" + path + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return parse_plan(ss.str(), fs::path(path).parent_path().string().empty()
	                                ? std::string(".")
	                                : fs::path(path).parent_path().string());
}

ExperimentOutcome run_experiment(const ExperimentPlan& plan, std::ostream* progress)
{
	plan.validate();
	fs::create_directories(plan.output_dir);
	ExperimentOutcome outcome;
	const auto out_path = [&](const std::string& file) {
		return (fs::path(plan.output_dir) / file).string();
	};

	std::vector<std::string> summary;
	std::vector<std::string> baseline;

	for (const PlanMatrix& pm : plan.matrices) {
		SparseMat A;
		try {
			A = pm.path ? read_mm(*pm.path) : gen(*pm.spec);
		} catch (const std::exception& e) {
			for (const MethodKind k : plan.methods)
				outcome.failures.push_back({pm.name, method_name({k, plan.jacobi}), e.what()});
			continue;
		}
		std::optional<SparseMat> Pi;
		std::vector<double> b;
		try {
			if (plan.jacobi)
				Pi = jacobi(A);
			if (plan.verify_every > 0) {
				b = make_rhs(A, plan.rhs);
				const SolveReport base = linear_pcg(A, b, nullptr, plan.pcg_tol, plan.pcg_maxit);
				baseline.push_back(pm.name + "," + std::to_string(base.iterations) + ","
				                   + (base.converged ? "true" : "false"));
			}
		} catch (const std::exception& e) {
			for (const MethodKind k : plan.methods)
				outcome.failures.push_back({pm.name, method_name({k, plan.jacobi}), e.what()});
			continue;
		}

		for (const MethodKind kind : plan.methods) {
			const Method method{kind, plan.jacobi};
			const std::string mname = method_name(method);
			try {
				RunConfig cfg;
				cfg.method = method;
				cfg.max_iters = plan.max_iters;
				cfg.res_tol = plan.res_tol;
				cfg.density_cap = plan.density_cap;
				cfg.dropping_enabled = plan.drop;
				cfg.drop_search_direction = plan.drop_direction;
				cfg.record_timing = plan.timing;

				std::vector<std::string> verify_rows;
				Index last_verified = -1;
				const auto verify = [&](const IterState& s) {
					const SolveReport rep = linear_pcg(A, b, &s.M, plan.pcg_tol, plan.pcg_maxit);
					verify_rows.push_back(std::to_string(s.i) + "," + std::to_string(rep.iterations) + ","
					                      + (rep.converged ? "true" : "false") + ","
					                      + (rep.backward_errors.empty()
					                             ? std::string()
					                             : format_real(rep.backward_errors.back())));
					last_verified = s.i;
				};
				IterationObserver obs;
				if (plan.verify_every > 0)
					obs = [&](const IterState& s, const IterRecord&) {
						if (s.i > 0 && s.i % plan.verify_every == 0)
							verify(s);
					};

				if (progress)
					*progress << pm.name << " " << mname << " ..." << std::flush;
				const SparseMat M0 = SparseMat::zeros(A.rows(), A.cols());
				RunResult res = run(A, M0, Pi ? &*Pi : nullptr, cfg, nullptr, obs);
				if (plan.verify_every > 0 && res.state.i > 0 && last_verified != res.state.i)
					verify(res.state);

				const std::string conv = out_path(pm.name + "_" + mname + ".csv");
				write_convergence_csv(conv, res.records, plan.timing);
				outcome.files.push_back(conv);
				if (plan.verify_every > 0) {
					const std::string vpath = out_path(pm.name + "_" + mname + "_verify.csv");
					detail::write_atomically(vpath, [&](std::ostream& o) {
						o << "iter,pcg_iterations,converged,final_backward_error\n";
						for (const auto& row : verify_rows)
							o << row << '\n';
					});
					outcome.files.push_back(vpath);
				}

				std::string lmin, lmax;
				if (plan.probe_spectrum) {
					const SpectralProbe p = spectral_probe(res.state.M);
					lmin = format_real(p.lambda_min_est);
					lmax = format_real(p.lambda_max_est);
				}
				const IterRecord& last = res.records.back();
				summary.push_back(pm.name + "," + mname + "," + lmin + "," + lmax + ","
				                  + format_real(last.res_norm) + "," + std::to_string(last.iter) + ","
				                  + format_real(last.density_M));
				if (progress)
					*progress << " " << stop_reason_name(res.reason) << " after " << last.iter
					          << " iterations, ||R||_F = " << format_real(last.res_norm) << "\n";
			} catch (const std::exception& e) {
				if (progress)
					*progress << " failed: " << e.what() << "\n";
				outcome.failures.push_back({pm.name, mname, e.what()});
			}
		}
	}

	const std::string sp = out_path("summary.csv");
	detail::write_atomically(sp, [&](std::ostream& o) {
		o << summary_csv_header << '\n';
		for (const auto& row : summary)
			o << row << '\n';
	});
	outcome.files.push_back(sp);

	if (plan.verify_every > 0) {
		const std::string bp = out_path("baseline.csv");
		detail::write_atomically(bp, [&](std::ostream& o) {
			o << "matrix,cg_iterations,converged\n";
			for (const auto& row : baseline)
				o << row << '\n';
		});
		outcome.files.push_back(bp);
	}

	if (!outcome.failures.empty()) {
		const std::string ep = out_path("errors.csv");
		detail::write_atomically(ep, [&](std::ostream& o) {
			o << "matrix,method,message\n";
			for (const auto& f : outcome.failures) {
				std::string msg = f.message;
				std::replace(msg.begin(), msg.end(), '"', '\'');
				std::replace(msg.begin(), msg.end(), '\n', ' ');
				o << f.matrix << ',' << f.method << ",\"" << msg << "\"\n";
			}
		});
		outcome.files.push_back(ep);
	}
	return outcome;
}

} // namespace spai
