#pragma once

// CSV writers for the documented output files. Every real is written with 17
// significant digits so that doubles round-trip exactly.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qgsw/analysis.hpp"
#include "qgsw/dynamics.hpp"

namespace qgsw::io {

std::string format_double(double v);

/// Header "t,area,perimeter,chord_arc,max_speed".
void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticsRecord> records);
/// Header "epsilon,sup_distance".
void write_convergence_csv(std::ostream& out, const analysis::ConvergenceReport& report);
/// Header "seed,t,x1,x2".
void write_tracers_csv(std::ostream& out, std::span<const TracerPath> paths);

/// Output directory that remembers every file written through it.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  /// Writes `content` to dir/name and records the name.
  void write(const std::string& name, const std::string& content);
  const std::vector<std::string>& files() const { return files_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

/// snapshot_NNNNN.csv for every snapshot plus diagnostics.csv.
void export_trajectory(ArtifactWriter& writer, const Trajectory& trajectory);

}  // namespace qgsw::io
