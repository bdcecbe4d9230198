#include "gsfv/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace gsfv::io {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoFailure("write to " + path.string() + " failed");
}

}  // namespace

void write_field_snapshot(const CellField<double>& field, const std::filesystem::path& path,
                          SnapshotFormat format, double lo, double hi) {
  const auto& mesh = field.mesh();
  const Eigen::Index nx = mesh.nx(), ny = mesh.ny();
  if (format == SnapshotFormat::Csv) {
    auto out = open_for_write(path, std::ios::out | std::ios::trunc);
    for (Eigen::Index j = 0; j < ny; ++j) {
      for (Eigen::Index i = 0; i < nx; ++i) {
        if (i) out << ',';
        out << fmt17(field[j * nx + i]);
      }
      out << '\n';
    }
    finish(out, path);
    return;
  }

  if (!(hi > lo)) throw DomainError("snapshot range needs hi > lo");
  auto out = open_for_write(path, std::ios::out | std::ios::binary | std::ios::trunc);
  out << "P5\n" << nx << ' ' << ny << "\n65535\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(2 * nx));
  for (Eigen::Index j = ny - 1; j >= 0; --j) {
    for (Eigen::Index i = 0; i < nx; ++i) {
      const double x = field[j * nx + i];
      const double scaled = std::isnan(x) ? 0.0 : std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
      const auto sample = static_cast<unsigned>(std::floor(scaled * 65535.0 + 0.5));
      row[static_cast<std::size_t>(2 * i)] = static_cast<unsigned char>(sample >> 8);
      row[static_cast<std::size_t>(2 * i + 1)] = static_cast<unsigned char>(sample & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  finish(out, path);
}

CellField<double> read_field_csv(const std::filesystem::path& path, const MeshPtr<double>& mesh) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path.string());
  CellField<double> field(mesh);
  Eigen::Index k = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (k >= field.size()) throw IoFailure(path.string() + " has more values than cells");
      field[k++] = std::strtod(cell.c_str(), nullptr);
    }
  }
  if (k != field.size()) throw IoFailure(path.string() + " has too few values");
  return field;
}

std::string format_error_table(const mms::ErrorTable& table) {
  const bool keyed = table.key_name == "eps";
  std::ostringstream out;
  out << (keyed ? "eps," : "") << kErrorTableHeader << '\n';
  for (const auto& r : table.rows) {
    if (keyed) out << fmt17(r.key) << ',';
    out << fmt17(r.h) << ',' << fmt17(r.dt) << ',' << fmt17(r.err_l2_u) << ',' << fmt17(r.err_l2_v)
        << ',' << fmt17(r.err_linf_u) << ',' << fmt17(r.err_linf_v) << ',' << fmt17(r.runtime_s)
        << '\n';
  }
  out << "order";
  for (double o : table.orders) out << ',' << fmt17(o);
  out << '\n';
  return out.str();
}

void write_error_table(const mms::ErrorTable& table, const std::filesystem::path& path) {
  write_text(path, format_error_table(table));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_for_write(path, std::ios::out | std::ios::trunc);
  out << text;
  finish(out, path);
}

}  // namespace gsfv::io
