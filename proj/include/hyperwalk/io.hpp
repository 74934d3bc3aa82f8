#pragma once

// Locale-independent CSV output. Reals are written with 17 significant
// digits so that every value round-trips.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>

#include "hyperwalk/doob.hpp"
#include "hyperwalk/explore.hpp"
#include "hyperwalk/mc.hpp"

namespace hyperwalk {

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

inline std::string format_real(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

inline void write_trace_csv(std::ostream& out, const ExplorationTrace& trace) {
  out << "t,edges,eta,xi,zeta,nullity_inc,A,C,X,new_component\n";
  for (const auto& s : trace.steps) {
    out << s.t << ',' << s.edge_count << ',' << s.eta << ',' << s.xi << ',' << s.zeta << ','
        << s.nullity_inc << ',' << s.A << ',' << s.C << ',' << s.X << ','
        << (s.started_new_component ? 1 : 0) << '\n';
  }
}

inline void write_components_csv(std::ostream& out, const ExplorationTrace& trace) {
  out << "index,t_start,t_end,vertices,edges,nullity\n";
  for (const auto& c : trace.components) {
    out << c.index << ',' << c.t_start << ',' << c.t_end << ',' << c.vertices << ',' << c.edges << ','
        << c.nullity << '\n';
  }
}

// Per-step rows, then a summary row keyed by a leading "summary" marker.
inline void write_doob_csv(std::ostream& out, const DoobTrace& d, double c1) {
  out << "t,D,Delta,Dstar,DeltaStar,S,Xtilde,Shat\n";
  for (std::int64_t t = 1; t <= d.length(); ++t) {
    const auto i = static_cast<std::size_t>(t);
    out << t << ',' << format_real(d.D[i]) << ',' << format_real(d.Delta[i]) << ','
        << format_real(d.Dstar[i]) << ',' << format_real(d.DeltaStar[i]) << ',' << format_real(d.S[i])
        << ',' << format_real(d.Xtilde[i]) << ',' << format_real(d.Shat[i]) << '\n';
  }
  out << "summary,t1,V1,V2,V12,lindeberg1_realized,lindeberg2_realized,c1\n";
  out << "summary," << d.t1 << ',' << format_real(d.V1) << ',' << format_real(d.V2) << ','
      << format_real(d.V12) << ',' << format_real(d.lindeberg1) << ',' << format_real(d.lindeberg2) << ','
      << format_real(c1) << '\n';
}

inline void write_mc_csv(std::ostream& out, const std::vector<CellReport>& reports) {
  out << "cell,n,r,eps,R,mean_L1,var_L1,mean_N1,var_N1,cov,corr,z1_mean,z1_var,z2_mean,z2_var,ks_z1,ks_z2\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& rep = reports[i];
    const auto& a = rep.agg;
    const bool z = a.z.count > 0;
    out << i << ',' << rep.cell.n << ',' << rep.cell.r << ',' << format_real(rep.cell.eps) << ','
        << rep.replicates << ',' << format_real(a.ln.mean_x) << ',' << format_real(a.ln.var_x()) << ','
        << format_real(a.ln.mean_y) << ',' << format_real(a.ln.var_y()) << ',' << format_real(a.ln.cov())
        << ',' << format_real(a.ln.corr()) << ',' << (z ? format_real(a.z.mean_x) : "") << ','
        << format_real(a.z.var_x()) << ',' << (z ? format_real(a.z.mean_y) : "") << ','
        << format_real(a.z.var_y()) << ',' << format_real(rep.ks_z1) << ',' << format_real(rep.ks_z2)
        << '\n';
  }
}

inline void write_tails_csv(std::ostream& out, const TailReport& rep) {
  out << "L,exceed_count,R,p_hat,wilson_lo,wilson_hi,bound\n";
  for (const auto& row : rep.rows) {
    out << row.L << ',' << row.exceed << ',' << row.R << ',' << format_real(row.p_hat) << ','
        << format_real(row.wilson.lo) << ',' << format_real(row.wilson.hi) << ',' << format_real(row.bound)
        << '\n';
  }
}

}  // namespace hyperwalk
