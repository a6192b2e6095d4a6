#include "qgsw/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qgsw/errors.hpp"

namespace qgsw::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticsRecord> records) {
  out << "t,area,perimeter,chord_arc,max_speed\n";
  for (const auto& r : records) {
    out << format_double(r.time) << ',' << format_double(r.area) << ',' << format_double(r.perimeter) << ','
        << format_double(r.chord_arc) << ',' << format_double(r.max_speed) << '\n';
  }
}

void write_convergence_csv(std::ostream& out, const analysis::ConvergenceReport& report) {
  out << "epsilon,sup_distance\n";
  for (std::size_t i = 0; i < report.epsilons.size(); ++i) {
    out << format_double(report.epsilons[i]) << ',' << format_double(report.sup_distances[i]) << '\n';
  }
}

void write_tracers_csv(std::ostream& out, std::span<const TracerPath> paths) {
  out << "seed,t,x1,x2\n";
  for (std::size_t s = 0; s < paths.size(); ++s) {
    const auto& p = paths[s];
    for (std::size_t i = 0; i < p.times.size(); ++i) {
      out << s << ',' << format_double(p.times[i]) << ',' << format_double(p.positions[i].x1) << ','
          << format_double(p.positions[i].x2) << '\n';
    }
  }
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_)) {
    throw ArgumentError("output directory '" + dir_.string() + "' cannot be created: " + ec.message());
  }
}

void ArtifactWriter::write(const std::string& name, const std::string& content) {
  const auto path = dir_ / name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ArgumentError("cannot open '" + path.string() + "' for writing");
  f << content;
  f.close();
  if (!f) throw ArgumentError("failed writing '" + path.string() + "'");
  files_.push_back(name);
}

void export_trajectory(ArtifactWriter& writer, const Trajectory& trajectory) {
  for (std::size_t i = 0; i < trajectory.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%05zu.csv", i);
    std::ostringstream os;
    write_contour_csv(os, trajectory.snapshots[i].contour);
    writer.write(name, os.str());
  }
  std::ostringstream os;
  write_diagnostics_csv(os, trajectory.diagnostics);
  writer.write("diagnostics.csv", os.str());
}

}  // namespace qgsw::io
