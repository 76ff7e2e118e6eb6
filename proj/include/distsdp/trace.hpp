#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace distsdp {

struct TraceRow {
  long iter = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double consensus_gap = 0.0;
  double dx_fro = 0.0;
  std::optional<double> max_s_norm;  // async only
  double wall_ms = 0.0;
};

struct Trace {
  std::vector<TraceRow> rows;

  // CSV with header iter,f,grad_norm,consensus_gap,dx_fro,max_s_norm,wall_ms.
  // Doubles are printed in shortest round-trip form. When with_timing is
  // false the wall_ms column is written as 0 so that files are reproducible.
  void write_csv(std::ostream& os, bool with_timing) const;
  void write_csv(const std::string& path, bool with_timing) const;
};

std::string format_double(double x);

}  // namespace distsdp
