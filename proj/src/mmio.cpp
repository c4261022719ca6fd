#include "spai/mmio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "atomic_file.hpp"

namespace spai {

namespace {

std::string lower(std::string s)
{
	std::transform(s.begin(), s.end(), s.begin(),
	               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
	return s;
}

MMHeader parse_header(const std::string& line)
{
	std::istringstream ls(line);
	std::string banner, object, format, field, symmetry;
	ls >> banner >> object >> format >> field >> symmetry;
	if (banner != "%%MatrixMarket")
		throw MMHeaderError("missing %%MatrixMarket banner", 1);
	if (lower(object) != "matrix")
		throw MMHeaderError("unsupported object '" + object + "'", 1);
	if (lower(format) != "coordinate")
		throw MMFormatError("unsupported format '" + format + "' (only coordinate is read)", 1);

	MMHeader h;
	const std::string f = lower(field);
	if (f == "real")
		h.field = MMField::Real;
	else if (f == "integer")
		h.field = MMField::Integer;
	else if (f == "pattern")
		h.field = MMField::Pattern;
	else
		throw MMHeaderError("unsupported field '" + field + "'", 1);

	const std::string s = lower(symmetry);
	if (s == "general")
		h.symmetry = MMSymmetry::General;
	else if (s == "symmetric")
		h.symmetry = MMSymmetry::Symmetric;
	else
		throw MMHeaderError("unsupported symmetry '" + symmetry + "'", 1);
	return h;
}

bool blank_or_comment(const std::string& line)
{
	const auto p = line.find_first_not_of(" \t\r");
	return p == std::string::npos || line[p] == '%';
}

template <typename T>
bool read_token(std::istringstream& ls, T& v)
{
	std::string tok;
	if (!(ls >> tok))
		return false;
	if constexpr (std::is_floating_point_v<T>) {
		char* end = nullptr;
		v = std::strtod(tok.c_str(), &end);
		return end == tok.c_str() + tok.size();
	} else {
		const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
		return ec == std::errc() && ptr == tok.data() + tok.size();
	}
}

} // namespace

SparseMat read_mm(std::istream& in, MMHeader* header_out)
{
	std::string line;
	if (!std::getline(in, line))
		throw MMHeaderError("empty input", 1);
	const MMHeader h = parse_header(line);
	std::size_t lineno = 1;

	Index nrows = 0, ncols = 0, nnz = 0;
	for (;;) {
		if (!std::getline(in, line))
			throw MMDataError("missing size line", lineno + 1);
		++lineno;
		if (blank_or_comment(line))
			continue;
		std::istringstream ls(line);
		std::string rest;
		if (!read_token(ls, nrows) || !read_token(ls, ncols) || !read_token(ls, nnz) || (ls >> rest)
		    || nrows < 0 || ncols < 0 || nnz < 0)
			throw MMDataError("malformed size line '" + line + "'", lineno);
		break;
	}
	if (h.symmetry == MMSymmetry::Symmetric && nrows != ncols)
		throw MMDataError("symmetric matrix must be square", lineno);

	std::vector<Triplet> trips;
	trips.reserve(static_cast<std::size_t>(h.symmetry == MMSymmetry::Symmetric ? 2 * nnz : nnz));
	Index seen = 0;
	while (std::getline(in, line)) {
		++lineno;
		if (blank_or_comment(line))
			continue;
		if (seen == nnz)
			throw MMDataError("more entries than the " + std::to_string(nnz) + " declared", lineno);
		std::istringstream ls(line);
		Index i = 0, j = 0;
		double v = 1.0;
		bool ok = read_token(ls, i) && read_token(ls, j);
		if (ok && h.field == MMField::Integer) {
			long long iv = 0;
			ok = read_token(ls, iv);
			v = static_cast<double>(iv);
		} else if (ok && h.field == MMField::Real) {
			ok = read_token(ls, v);
		}
		std::string rest;
		if (!ok || (ls >> rest))
			throw MMDataError("malformed entry '" + line + "'", lineno);
		if (i < 1 || i > nrows || j < 1 || j > ncols)
			throw MMBoundsError("entry (" + std::to_string(i) + "," + std::to_string(j)
			                        + ") outside " + std::to_string(nrows) + "x" + std::to_string(ncols),
			                    lineno);
		if (h.symmetry == MMSymmetry::Symmetric && j > i)
			throw MMDataError("symmetric file stores an upper-triangle entry", lineno);
		trips.push_back({i - 1, j - 1, v});
		if (h.symmetry == MMSymmetry::Symmetric && i != j)
			trips.push_back({j - 1, i - 1, v});
		++seen;
	}
	if (seen != nnz)
		throw MMDataError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen),
		                  lineno);
	if (header_out)
		*header_out = h;
	return SparseMat::from_triplets(nrows, ncols, std::move(trips));
}

SparseMat read_mm(const std::string& path, MMHeader* header)
{
	std::ifstream in(path);
	if (!in)
		throw MMError("cannot open '" + path + "'", 0);
	return read_mm(in, header);
}

void write_mm(const SparseMat& M, std::ostream& out, bool symmetry_hint)
{
	const bool sym = symmetry_hint && M.is_square() && is_exactly_symmetric(M);
	Index count = 0;
	if (sym) {
		for (Index i = 0; i < M.rows(); ++i)
			for (const Index j : M.row(i).cols)
				count += j <= i;
	} else {
		count = M.nnz();
	}
	out << "%%MatrixMarket matrix coordinate real " << (sym ? "symmetric" : "general") << "\n";
	out << M.rows() << " " << M.cols() << " " << count << "\n";
	char buf[40];
	for (Index i = 0; i < M.rows(); ++i) {
		const auto r = M.row(i);
		for (std::size_t p = 0; p < r.size(); ++p) {
			if (sym && r.cols[p] > i)
				break;
			std::snprintf(buf, sizeof buf, "%.17g", r.vals[p]);
			out << (i + 1) << " " << (r.cols[p] + 1) << " " << buf << "\n";
		}
	}
}

void write_mm(const SparseMat& M, const std::string& path, bool symmetry_hint)
{
	detail::write_atomically(path, [&](std::ostream& out) { write_mm(M, out, symmetry_hint); });
}

} // namespace spai
