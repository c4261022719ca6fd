#include "spai/matgen.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace spai {

namespace {

std::uint64_t mix64(std::uint64_t z)
{
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
	return z ^ (z >> 31);
}

// Independent streams of one spec.
constexpr std::uint64_t stream_positions = 1;
constexpr std::uint64_t stream_diagonal = 2;
constexpr std::uint64_t stream_offdiag = 3;
constexpr std::uint64_t stream_pattern = 4;
constexpr std::uint64_t stream_density = 5;

void fail(const std::string& field, const std::string& why)
{
	throw std::invalid_argument("MatrixSpec." + field + ": " + why);
}

std::string fmt(double v)
{
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.17g", v);
	return buf;
}

/// Diagonal of L: k planted values at distinct random rows, 1 elsewhere.
std::vector<double> planted_diagonal(const MatrixSpec& s)
{
	std::vector<double> d(static_cast<std::size_t>(s.n), 1.0);
	std::vector<Index> rows(static_cast<std::size_t>(s.n));
	for (Index i = 0; i < s.n; ++i)
		rows[static_cast<std::size_t>(i)] = i;
	CounterRng pos(s.seed, stream_positions);
	CounterRng val(s.seed, stream_diagonal);
	for (Index k = 0; k < s.k_distinct; ++k) {
		const auto remaining = static_cast<std::uint64_t>(s.n - k);
		const auto pick = static_cast<Index>(k + static_cast<Index>(pos.below(remaining)));
		std::swap(rows[static_cast<std::size_t>(k)], rows[static_cast<std::size_t>(pick)]);
		d[static_cast<std::size_t>(rows[static_cast<std::size_t>(k)])] = val.uniform(s.eig_low, s.eig_high);
	}
	return d;
}

SparseMat banded_factor(const MatrixSpec& s, Index bandwidth)
{
	const std::vector<double> d = planted_diagonal(s);
	CounterRng off(s.seed, stream_offdiag);
	SparseBuilder b(s.n, s.n, static_cast<std::size_t>(s.n * (bandwidth + 1)));
	for (Index i = 0; i < s.n; ++i) {
		for (Index j = std::max<Index>(0, i - bandwidth); j < i; ++j)
			b.push(j, off.uniform(s.offdiag_low, s.offdiag_high));
		b.push(i, d[static_cast<std::size_t>(i)]);
		b.end_row();
	}
	return std::move(b).finish();
}

/// Row and column of the t-th strictly lower entry in row-major order.
std::pair<Index, Index> lower_position(std::uint64_t t)
{
	auto i = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(t))) / 2.0);
	while (i * (i - 1) / 2 > t)
		--i;
	while ((i + 1) * i / 2 <= t)
		++i;
	return {static_cast<Index>(i), static_cast<Index>(t - i * (i - 1) / 2)};
}

SparseMat random_pattern_factor(const MatrixSpec& s)
{
	const auto n = static_cast<std::uint64_t>(s.n);
	const std::uint64_t total = n * (n - 1) / 2;
	const auto m = static_cast<std::uint64_t>(s.nnz_target);

	// Floyd's sampling of m distinct positions out of total.
	CounterRng pat(s.seed, stream_pattern);
	std::unordered_set<std::uint64_t> chosen;
	chosen.reserve(static_cast<std::size_t>(m) * 2);
	for (std::uint64_t j = total - m; j < total; ++j) {
		const std::uint64_t t = pat.below(j + 1);
		if (!chosen.insert(t).second)
			chosen.insert(j);
	}
	std::vector<std::uint64_t> picks(chosen.begin(), chosen.end());
	std::sort(picks.begin(), picks.end());

	CounterRng diag(s.seed, stream_diagonal);
	CounterRng off(s.seed, stream_offdiag);
	std::vector<Triplet> trips;
	trips.reserve(picks.size() + static_cast<std::size_t>(s.n));
	for (Index i = 0; i < s.n; ++i)
		trips.push_back({i, i, diag.uniform(s.eig_low, s.eig_high)});
	for (const std::uint64_t t : picks) {
		const auto [i, j] = lower_position(t);
		trips.push_back({i, j, off.uniform(s.offdiag_low, s.offdiag_high)});
	}
	return SparseMat::from_triplets(s.n, s.n, std::move(trips));
}

SparseMat poisson2d(Index nx, Index ny)
{
	const Index n = nx * ny;
	SparseBuilder b(n, n, static_cast<std::size_t>(5 * n));
	for (Index y = 0; y < ny; ++y) {
		for (Index x = 0; x < nx; ++x) {
			const Index k = y * nx + x;
			if (y > 0)
				b.push(k - nx, -1.0);
			if (x > 0)
				b.push(k - 1, -1.0);
			b.push(k, 4.0);
			if (x + 1 < nx)
				b.push(k + 1, -1.0);
			if (y + 1 < ny)
				b.push(k + nx, -1.0);
			b.end_row();
		}
	}
	return std::move(b).finish();
}

SparseMat wathen(Index nx, Index ny, std::uint64_t seed)
{
	static constexpr std::array<std::array<double, 4>, 4> e1 = {{
		{6, -6, 2, -8}, {-6, 32, -6, 20}, {2, -6, 6, -6}, {-8, 20, -6, 32}}};
	static constexpr std::array<std::array<double, 4>, 4> e2 = {{
		{3, -8, 2, -6}, {-8, 16, -8, 20}, {2, -8, 3, -8}, {-6, 20, -8, 16}}};
	std::array<std::array<double, 8>, 8> e{};
	for (int r = 0; r < 4; ++r) {
		for (int c = 0; c < 4; ++c) {
			e[r][c] = e1[r][c] / 45.0;
			e[r][c + 4] = e2[r][c] / 45.0;
			e[r + 4][c] = e2[c][r] / 45.0;
			e[r + 4][c + 4] = e1[r][c] / 45.0;
		}
	}

	const Index n = 3 * nx * ny + 2 * nx + 2 * ny + 1;
	CounterRng rho_rng(seed, stream_density);
	std::vector<Triplet> trips;
	trips.reserve(static_cast<std::size_t>(64 * nx * ny));
	for (Index j = 1; j <= ny; ++j) {
		for (Index i = 1; i <= nx; ++i) {
			std::array<Index, 8> nn{};
			nn[0] = 3 * j * nx + 2 * i + 2 * j + 1;
			nn[1] = nn[0] - 1;
			nn[2] = nn[1] - 1;
			nn[3] = (3 * j - 1) * nx + 2 * j + i - 1;
			nn[4] = 3 * (j - 1) * nx + 2 * i + 2 * j - 3;
			nn[5] = nn[4] + 1;
			nn[6] = nn[5] + 1;
			nn[7] = nn[3] + 1;
			const double rho = 100.0 * rho_rng.uniform(0.0, 1.0);
			for (int r = 0; r < 8; ++r)
				for (int c = 0; c < 8; ++c)
					trips.push_back({nn[r] - 1, nn[c] - 1, e[r][c] * rho});
		}
	}
	return SparseMat::from_triplets(n, n, std::move(trips));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text)
{
	T v{};
	const char* first = text.data();
	const char* last = text.data() + text.size();
	if constexpr (std::is_floating_point_v<T>) {
		char* end = nullptr;
		v = std::strtod(first, &end);
		if (text.empty() || end != last)
			fail(key, "expected a number, got '" + text + "'");
	} else {
		const auto [ptr, ec] = std::from_chars(first, last, v);
		if (ec != std::errc() || ptr != last)
			fail(key, "expected an integer, got '" + text + "'");
	}
	return v;
}

std::string trim(std::string_view s)
{
	const auto b = s.find_first_not_of(" \t\r");
	if (b == std::string_view::npos)
		return {};
	const auto e = s.find_last_not_of(" \t\r");
	return std::string(s.substr(b, e - b + 1));
}

} // namespace

std::uint64_t CounterRng::next_u64()
{
	const std::uint64_t key = mix64(seed_ ^ mix64(stream_ + 0x632be59bd9b4e019ULL));
	return mix64(key + 0x9e3779b97f4a7c15ULL * ++counter_);
}

double CounterRng::uniform(double lo, double hi)
{
	const double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
	const double v = lo + (hi - lo) * u;
	return std::clamp(v, std::nextafter(lo, hi), std::nextafter(hi, lo));
}

std::uint64_t CounterRng::below(std::uint64_t bound)
{
	if (bound == 0)
		throw std::invalid_argument("CounterRng::below: empty range");
	// Rejection keeps the draw unbiased.
	const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound) - 1;
	for (;;) {
		const std::uint64_t x = next_u64();
		if (x <= limit)
			return x % bound;
	}
}

std::string family_token(Family f)
{
	switch (f) {
	case Family::TriEigs: return "tri-eigs";
	case Family::BandedEigs: return "banded-eigs";
	case Family::RandPattern: return "rand-pattern";
	case Family::Poisson2D: return "poisson2d";
	case Family::Wathen: return "wathen";
	}
	return "?";
}

Family parse_family(std::string_view token)
{
	for (const Family f : {Family::TriEigs, Family::BandedEigs, Family::RandPattern,
	                       Family::Poisson2D, Family::Wathen})
		if (token == family_token(f))
			return f;
	throw std::invalid_argument("unknown matrix family '" + std::string(token)
	                            + "' (expected tri-eigs, banded-eigs, rand-pattern, poisson2d or wathen)");
}

void MatrixSpec::validate() const
{
	switch (family) {
	case Family::TriEigs:
	case Family::BandedEigs:
	case Family::RandPattern:
		if (n < 1)
			fail("n", "must be at least 1");
		if (!(eig_low < eig_high))
			fail("eig_low", "must be below eig_high");
		if (!(eig_low >= 0.0))
			fail("eig_low", "planted eigenvalues must be positive");
		if (!(offdiag_low < offdiag_high))
			fail("offdiag_low", "must be below offdiag_high");
		if (!std::isfinite(eig_high) || !std::isfinite(offdiag_low) || !std::isfinite(offdiag_high))
			fail("eig_high", "ranges must be finite");
		break;
	case Family::Poisson2D:
	case Family::Wathen:
		if (nx < 1)
			fail("nx", "must be at least 1");
		if (ny < 1)
			fail("ny", "must be at least 1");
		break;
	}
	if (family == Family::TriEigs || family == Family::BandedEigs) {
		if (k_distinct < 0 || k_distinct > n)
			fail("k_distinct", "must lie in [0, n]");
	}
	if (family == Family::BandedEigs && (bandwidth < 1 || (n > 1 && bandwidth > n - 1)))
		fail("bandwidth", "must lie in [1, n-1]");
	if (family == Family::RandPattern) {
		const auto total = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2;
		if (nnz_target < 0 || static_cast<std::uint64_t>(nnz_target) > total)
			fail("nnz_target", "must lie in [0, n(n-1)/2]");
	}
}

Index MatrixSpec::order() const
{
	switch (family) {
	case Family::Poisson2D: return nx * ny;
	case Family::Wathen: return 3 * nx * ny + 2 * nx + 2 * ny + 1;
	default: return n;
	}
}

SparseMat gen_factor(const MatrixSpec& spec)
{
	spec.validate();
	switch (spec.family) {
	case Family::TriEigs: return banded_factor(spec, 1);
	case Family::BandedEigs: return banded_factor(spec, spec.bandwidth);
	case Family::RandPattern: return random_pattern_factor(spec);
	default: throw std::invalid_argument("gen_factor: " + family_token(spec.family) + " has no factor");
	}
}

SparseMat gen(const MatrixSpec& spec)
{
	spec.validate();
	switch (spec.family) {
	case Family::Poisson2D: return poisson2d(spec.nx, spec.ny);
	case Family::Wathen: return wathen(spec.nx, spec.ny, spec.seed);
	default: {
		const SparseMat L = gen_factor(spec);
		return spgemm(L, transpose(L));
	}
	}
}

std::string to_key_values(const MatrixSpec& s)
{
	std::ostringstream os;
	os << "family=" << family_token(s.family) << "\n";
	switch (s.family) {
	case Family::TriEigs:
	case Family::BandedEigs:
		os << "n=" << s.n << "\n"
		   << "k=" << s.k_distinct << "\n";
		if (s.family == Family::BandedEigs)
			os << "bandwidth=" << s.bandwidth << "\n";
		break;
	case Family::RandPattern:
		os << "n=" << s.n << "\n"
		   << "nnz=" << s.nnz_target << "\n";
		break;
	case Family::Poisson2D:
	case Family::Wathen:
		os << "nx=" << s.nx << "\n"
		   << "ny=" << s.ny << "\n";
		break;
	}
	if (s.family != Family::Poisson2D && s.family != Family::Wathen) {
		os << "eig_low=" << fmt(s.eig_low) << "\n"
		   << "eig_high=" << fmt(s.eig_high) << "\n"
		   << "offdiag_low=" << fmt(s.offdiag_low) << "\n"
		   << "offdiag_high=" << fmt(s.offdiag_high) << "\n";
	}
	if (s.family != Family::Poisson2D)
		os << "seed=" << s.seed << "\n";
	return os.str();
}

MatrixSpec spec_from_map(const std::map<std::string, std::string>& kv)
{
	MatrixSpec s;
	const auto it = kv.find("family");
	if (it == kv.end())
		fail("family", "missing");
	s.family = parse_family(it->second);
	for (const auto& [key, value] : kv) {
		if (key == "family")
			continue;
		if (key == "n")
			s.n = parse_number<Index>(key, value);
		else if (key == "k")
			s.k_distinct = parse_number<Index>(key, value);
		else if (key == "eig_low")
			s.eig_low = parse_number<double>(key, value);
		else if (key == "eig_high")
			s.eig_high = parse_number<double>(key, value);
		else if (key == "offdiag_low")
			s.offdiag_low = parse_number<double>(key, value);
		else if (key == "offdiag_high")
			s.offdiag_high = parse_number<double>(key, value);
		else if (key == "bandwidth")
			s.bandwidth = parse_number<Index>(key, value);
		else if (key == "nnz")
			s.nnz_target = parse_number<Index>(key, value);
		else if (key == "nx")
			s.nx = parse_number<Index>(key, value);
		else if (key == "ny")
			s.ny = parse_number<Index>(key, value);
		else if (key == "seed")
			s.seed = parse_number<std::uint64_t>(key, value);
		else
			fail(key, "unknown key");
	}
	s.validate();
	return s;
}

MatrixSpec spec_from_key_values(std::string_view text)
{
	std::map<std::string, std::string> kv;
	std::istringstream in{std::string(text)};
	std::string line;
	while (std::getline(in, line)) {
		const std::string t = trim(line);
		if (t.empty() || t.front() == '#')
			continue;
		const auto eq = t.find('=');
		if (eq == std::string::npos)
			throw std::invalid_argument("MatrixSpec: expected key=value, got '" + t + "'");
		kv[trim(std::string_view(t).substr(0, eq))] = trim(std::string_view(t).substr(eq + 1));
	}
	return spec_from_map(kv);
}

} // namespace spai
