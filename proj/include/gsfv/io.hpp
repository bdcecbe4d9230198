#pragma once

#include <filesystem>
#include <string>

#include "gsfv/field.hpp"
#include "gsfv/mms.hpp"

namespace gsfv::io {

enum class SnapshotFormat { Pgm, Csv };

/// Writes a cell field.
///
/// Pgm: binary P5, width nx, height ny, maxval 65535, sample =
/// round-half-up(65535 · clamp((x − lo) / (hi − lo), 0, 1)). The first image row
/// is the top of the domain (largest y).
/// Csv: one line per mesh row j = 0..ny−1 in cell-index order, values printed
/// with 17 significant digits so they parse back bit-exactly.
void write_field_snapshot(const CellField<double>& field, const std::filesystem::path& path,
                          SnapshotFormat format, double lo = 0.0, double hi = 1.0);

/// Reads a field written in Csv format back onto `mesh`.
CellField<double> read_field_csv(const std::filesystem::path& path, const MeshPtr<double>& mesh);

/// Header used by every error table.
inline constexpr const char* kErrorTableHeader =
    "h,dt,err_Linf_L2_u,err_Linf_L2_v,err_Linf_Linf_u,err_Linf_Linf_v,runtime_s";

/// Error table as CSV: header, one line per row, then `order,<l2_u>,<l2_v>,<linf_u>,<linf_v>`.
/// Interface tables carry a leading `eps` column since eps cannot be recovered from h or dt.
std::string format_error_table(const mms::ErrorTable& table);
void write_error_table(const mms::ErrorTable& table, const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace gsfv::io
