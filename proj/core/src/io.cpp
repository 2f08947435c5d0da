#include "sbtrans/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sbtrans {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                                   ec.message());
}

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << header << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed on " + path.string());
}

namespace {

void write_u64(std::ofstream& out, uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

uint64_t read_u64(std::ifstream& in) {
  uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void save_state(const std::filesystem::path& path, const State& s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_u64(out, 4);
  out.write(reinterpret_cast<const char*>(&s.time), sizeof s.time);
  for (int f = 0; f < 4; ++f) {
    const Eigen::VectorXd& v = s.field(static_cast<FieldId>(f));
    write_u64(out, static_cast<uint64_t>(v.size()));
    out.write(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  }
  if (!out) throw std::runtime_error("write failed on " + path.string());
}

State load_state(const std::filesystem::path& path, const CoupledLayout& layout) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  if (read_u64(in) != 4) throw std::runtime_error("checkpoint field count mismatch");
  State s = State::zero(layout);
  in.read(reinterpret_cast<char*>(&s.time), sizeof s.time);
  for (int f = 0; f < 4; ++f) {
    Eigen::VectorXd& v = s.field(static_cast<FieldId>(f));
    const uint64_t len = read_u64(in);
    if (len != static_cast<uint64_t>(v.size()))
      throw std::runtime_error("checkpoint dimension mismatch");
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(len * sizeof(double)));
  }
  if (!in) throw std::runtime_error("truncated checkpoint " + path.string());
  return s;
}

void write_matrix_text(const std::filesystem::path& path, const SparseMatrix& A) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    for (SparseMatrix::InnerIterator it(A, r); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << format_number(it.value()) << '\n';
}

void write_fields_text(const std::filesystem::path& path, const CoupledLayout& layout,
                       const State& s) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const Mesh& mesh = *layout.mesh;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    // vertex dofs come first in every space
    out << format_number(mesh.vertices[v][0]) << ' ' << format_number(mesh.vertices[v][1]) << ' '
        << format_number(s.u1[v]) << ' ' << format_number(s.u2[v]) << ' '
        << format_number(s.p[v]) << ' ' << format_number(s.c[v]) << '\n';
  }
}

}  // namespace sbtrans
