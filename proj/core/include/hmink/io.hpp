#pragma once

// CSV and JSON output. Numbers are written with 17 significant digits so doubles round-trip,
// lines end in LF, and files are replaced atomically (write to a sibling, then rename).

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hmink/hmcf.hpp"
#include "hmink/inequalities.hpp"
#include "hmink/q_iteration.hpp"

namespace hmink::io {

/// 17 significant digits; nan and inf are spelled out.
std::string format_number(double x);

/// Column-oriented table; every column has the same length.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  void add(std::string name, std::vector<double> values);
  [[nodiscard]] std::size_t rows() const;
  [[nodiscard]] std::string to_csv() const;
};

/// Writes `content` to `path` through a temporary file in the same directory.
void write_atomic(const std::filesystem::path& path, std::string_view content);

Table iterates_table(const IterationReport& report);
Table trace_table(const FlowTrace& trace);
Table surface_table(const AxisymmetricSurface& surf);

std::string bounds_json(const BoundsReport& report, int indent = 2);
std::string iteration_json(const IterationReport& report, int indent = 2);
std::string trace_json(const FlowTrace& trace, int indent = 2);
std::string audit_json(const AuditReport& audit, int indent = 2);

}  // namespace hmink::io
