#ifndef SPAI_ATOMIC_FILE_HPP
#define SPAI_ATOMIC_FILE_HPP

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>

namespace spai::detail {

/// Runs body on a sibling temporary file and renames it over path once body returns.
template <typename Body>
void write_atomically(const std::string& path, Body&& body)
{
	namespace fs = std::filesystem;
	const fs::path target(path);
	fs::path tmp = target;
	tmp += ".partial";
	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
		if (!out)
			throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
		try {
			body(out);
			out.flush();
			if (!out)
				throw std::runtime_error("write to '" + tmp.string() + "' failed");
		} catch (...) {
			out.close();
			std::error_code ec;
			fs::remove(tmp, ec);
			throw;
		}
	}
	std::error_code ec;
	fs::rename(tmp, target, ec);
	if (ec) {
		fs::remove(tmp, ec);
		throw std::runtime_error("cannot rename onto '" + path + "'");
	}
}

} // namespace spai::detail

#endif
