#include "distsdp/trace.hpp"

#include <charconv>
#include <fstream>

#include "distsdp/error.hpp"

namespace distsdp {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void Trace::write_csv(std::ostream& os, bool with_timing) const {
  os << "iter,f,grad_norm,consensus_gap,dx_fro,max_s_norm,wall_ms\n";
  for (const TraceRow& r : rows) {
    os << r.iter << ',' << format_double(r.f) << ',' << format_double(r.grad_norm) << ','
       << format_double(r.consensus_gap) << ',' << format_double(r.dx_fro) << ',';
    if (r.max_s_norm) os << format_double(*r.max_s_norm);
    os << ',' << (with_timing ? format_double(r.wall_ms) : std::string("0")) << '\n';
  }
}

void Trace::write_csv(const std::string& path, bool with_timing) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  write_csv(out, with_timing);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

}  // namespace distsdp
