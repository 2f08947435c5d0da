#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sbtrans/fe_space.hpp"
#include "sbtrans/linalg.hpp"

namespace sbtrans {

/// Locale-independent formatting used by every CSV writer ("." decimal).
std::string format_number(double v);

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows);

/// Checkpoint format: u64 field count, f64 time, then per field a u64 length
/// followed by raw little-endian doubles (native x86 byte order).
void save_state(const std::filesystem::path& path, const State& s);
State load_state(const std::filesystem::path& path, const CoupledLayout& layout);

/// Coordinate-format dump, one "row col value" line per stored entry.
void write_matrix_text(const std::filesystem::path& path, const SparseMatrix& A);

/// Per-vertex "x y u1 u2 p c" lines for external visualization.
void write_fields_text(const std::filesystem::path& path, const CoupledLayout& layout,
                       const State& s);

void ensure_directory(const std::filesystem::path& dir);

}  // namespace sbtrans
