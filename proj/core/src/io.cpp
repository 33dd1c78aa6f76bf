#include "hmink/io.hpp"

#include <cmath>
#include <fstream>
#include <system_error>

#include <fmt/core.h>
#include <json.hpp>

namespace hmink::io {

namespace {

using nlohmann::ordered_json;

// JSON has no NaN or infinity; those become null.
ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json numbers(const std::vector<double>& xs) {
  auto arr = ordered_json::array();
  for (const double x : xs) { arr.push_back(number(x)); }
  return arr;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) { return "nan"; }
  if (std::isinf(x)) { return x > 0 ? "inf" : "-inf"; }
  return fmt::format("{:.17g}", x);
}

void Table::add(std::string name, std::vector<double> values) {
  if (!columns.empty() && values.size() != columns.front().size()) {
    throw InvalidArgument(fmt::format("column '{}' has {} rows, table has {}", name, values.size(),
                                      columns.front().size()));
  }
  header.push_back(std::move(name));
  columns.push_back(std::move(values));
}

std::size_t Table::rows() const { return columns.empty() ? 0 : columns.front().size(); }

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c > 0) { out += ','; }
    out += header[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c > 0) { out += ','; }
      out += format_number(columns[c][r]);
    }
    out += '\n';
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) { throw Error(fmt::format("cannot open {} for writing", tmp.string())); }
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) { throw Error(fmt::format("write to {} failed", tmp.string())); }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(fmt::format("cannot rename into {}", path.string()));
  }
}

Table iterates_table(const IterationReport& report) {
  Table t;
  const auto xs = report.xi.xs();
  t.add("x", {xs.begin(), xs.end()});
  for (std::size_t n = 0; n < report.iterates.size(); ++n) {
    const auto ys = report.iterates[n].ys();
    t.add(fmt::format("q{}", n + 1), {ys.begin(), ys.end()});
  }
  const auto xi = report.xi.ys();
  t.add("xi", {xi.begin(), xi.end()});
  return t;
}

Table trace_table(const FlowTrace& tr) {
  Table t;
  std::vector<double> S, V, M, G;
  for (const auto& m : tr.measures) {
    S.push_back(m.S);
    V.push_back(m.V);
    M.push_back(m.M);
    G.push_back(m.totG);
  }
  t.add("t", tr.times);
  t.add("S", std::move(S));
  t.add("V", std::move(V));
  t.add("M", std::move(M));
  t.add("totG", std::move(G));
  t.add("phi1", tr.phi1);
  t.add("phiInf", tr.phiInf);
  t.add("dS_residual", tr.dS_residual);
  t.add("dV_residual", tr.dV_residual);
  t.add("kappa_min", tr.kappa_min);
  return t;
}

Table surface_table(const AxisymmetricSurface& surf) {
  Table t;
  t.add("u", surf.us());
  t.add("rho", {surf.rhos().begin(), surf.rhos().end()});
  return t;
}

std::string bounds_json(const BoundsReport& r, int indent) {
  ordered_json j;
  j["S"]               = number(r.S);
  j["V"]               = number(r.V);
  j["a"]               = number(r.a);
  j["euclidean"]       = number(r.euclidean);
  j["santalo"]         = number(r.santalo);
  j["ghomi_spruck"]    = number(r.ghomi_spruck);
  j["sharp"]           = number(r.sharp);
  j["bgl"]             = r.bgl ? number(*r.bgl) : ordered_json(nullptr);
  j["profile"]         = number(r.profile);
  j["gallego_solanes"] = number(r.gallego_solanes);
  j["feasible"]        = r.feasible;
  return j.dump(indent);
}

std::string iteration_json(const IterationReport& r, int indent) {
  ordered_json j;
  j["a"]         = number(r.config.sf.curvature());
  j["x_max"]     = number(r.config.x_max);
  j["n_points"]  = r.config.n_points;
  j["gaps"]      = numbers(r.gaps);
  j["residuals"] = numbers(r.residuals);
  j["converged"] = r.converged;
  j["n_final"]   = r.n_final;
  return j.dump(indent);
}

std::string trace_json(const FlowTrace& tr, int indent) {
  const auto table = trace_table(tr);
  ordered_json j;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    j[table.header[c]] = numbers(table.columns[c]);
  }
  return j.dump(indent);
}

std::string audit_json(const AuditReport& a, int indent) {
  ordered_json j;
  j["passed"]            = a.passed;
  j["phi_monotone"]      = a.phi_monotone;
  j["evolution_ok"]      = a.evolution_ok;
  j["gauss_bonnet_ok"]   = a.gauss_bonnet_ok;
  j["kleiner_ok"]        = a.kleiner_ok;
  j["sharp_ok"]          = a.sharp_ok;
  j["max_rise_phi1"]     = number(a.max_rise_phi1);
  j["tau_phi1"]          = number(a.tau_phi1);
  j["max_rise_phi2"]     = number(a.max_rise_phi2);
  j["tau_phi2"]          = number(a.tau_phi2);
  j["max_rise_phiInf"]   = number(a.max_rise_phiInf);
  j["tau_phiInf"]        = number(a.tau_phiInf);
  j["max_dS_rel"]        = number(a.max_dS_rel);
  j["max_dV_rel"]        = number(a.max_dV_rel);
  j["max_gb_rel"]        = number(a.max_gb_rel);
  j["min_kleiner_slack"] = number(a.min_kleiner_slack);
  j["min_sharp_slack"]   = number(a.min_sharp_slack);
  j["min_kappa"]         = number(a.min_kappa);
  return j.dump(indent);
}

}  // namespace hmink::io
