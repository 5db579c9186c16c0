#pragma once

#include "proxpool/graph.hpp"

#include <filesystem>
#include <ostream>
#include <string>

namespace proxpool {

/// printf "%.17g", enough digits to round-trip any double.
std::string format_double(double v);

/// Row-major, comma separated, no header.
void write_csv(std::ostream& out, const Matrix& m);
void write_csv(const std::filesystem::path& path, const Matrix& m);

/// "source,target,weight" rows for i <= j with a nonzero weight.
void write_edge_list(std::ostream& out, const Matrix& adjacency);

}  // namespace proxpool
