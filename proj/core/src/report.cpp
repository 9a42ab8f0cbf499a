#include "mps/report.hpp"

#include <cmath>
#include <cstdio>

namespace mps {

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char c : raw) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

std::string verdict_name(int verdict) {
  if (verdict == 1) return "pass";
  if (verdict == 0) return "fail";
  return "";
}

}  // namespace

void write_condition_csv(std::ostream& out, const ConditionReport& report) {
  out << "statistic,n,ell,delta,eps,value,threshold,verdict\n";
  const auto& ctx = report.context;
  const std::string ell = ctx.ell ? std::to_string(*ctx.ell) : "";
  const std::string delta = ctx.delta ? format_real(*ctx.delta) : "";
  const std::string eps = ctx.eps ? format_real(*ctx.eps) : "";
  for (const auto& entry : report.entries) {
    out << csv_field(entry.statistic) << ',' << ctx.n << ',' << ell << ',' << delta << ','
        << eps << ',' << format_real(entry.value) << ','
        << (std::isnan(entry.threshold) ? "" : format_real(entry.threshold)) << ','
        << verdict_name(entry.verdict) << '\n';
  }
}

void write_condition_text(std::ostream& out, const ConditionReport& report) {
  const auto& ctx = report.context;
  out << "model: " << ctx.model_id << '\n';
  out << "n: " << ctx.n << '\n';
  out << "p: " << ctx.p << '\n';
  if (ctx.ell) out << "ell: " << *ctx.ell << '\n';
  if (ctx.delta) out << "delta: " << format_real(*ctx.delta) << '\n';
  if (ctx.eps) out << "eps: " << format_real(*ctx.eps) << '\n';
  out << "seed: " << ctx.seed << '\n';
  for (const auto& entry : report.entries) {
    out << entry.statistic << " = " << format_real(entry.value);
    if (!std::isnan(entry.threshold)) out << "  (threshold " << format_real(entry.threshold) << ')';
    if (entry.verdict >= 0) out << "  [" << verdict_name(entry.verdict) << ']';
    out << '\n';
  }
}

void write_ensemble_csv(std::ostream& out, const ReplicateEnsemble& ensemble) {
  out << "replicate";
  if (ensemble.grid.empty()) {
    out << ",value";
  } else {
    for (double t : ensemble.grid) out << ",t=" << format_real(t);
  }
  out << '\n';
  for (std::size_t r = 0; r < ensemble.replicates; ++r) {
    out << r;
    for (std::size_t c = 0; c < ensemble.dim; ++c) out << ',' << format_real(ensemble.at(r, c));
    out << '\n';
  }
}

}  // namespace mps
