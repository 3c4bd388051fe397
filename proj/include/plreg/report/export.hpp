#pragma once

#include <fstream>
#include <iomanip>
#include <string>

#include <nlohmann/json.hpp>

#include "plreg/covering/chain.hpp"
#include "plreg/covering/holder.hpp"
#include "plreg/iterate/degiorgi.hpp"

namespace plreg {

// level-set iteration trace: one row per step
inline void write_trace_csv(const std::string& path, const DeGiorgiTrace& tr) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_trace_csv: cannot open " + path);
  os << std::setprecision(17);
  os << "n,k_n,rho_n,theta_n,rho_mid,theta_mid,Y_n,step_constant\n";
  for (const auto& s : tr.steps)
    os << s.n << ',' << s.k_n << ',' << s.rho_n << ',' << s.theta_n << ','
       << s.rho_mid << ',' << s.theta_mid << ',' << s.Y << ','
       << s.step_constant << '\n';
  os << "# k = " << tr.k << ", converged = " << tr.converged
     << ", time_window = " << (tr.symmetric_window ? "symmetric" : "backward")
     << ", empirical_constant = " << tr.empirical_constant << '\n';
}

// chain levels plus the switching record
inline void write_chain_csv(const std::string& path, const CylinderChain& ch,
                            const SwitchingRecord& sw) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_chain_csv: cannot open " + path);
  os << std::setprecision(17);
  os << "n,R_n,mu_n\n";
  for (const auto& lv : ch.levels)
    os << lv.n << ',' << lv.R << ',' << lv.mu << '\n';
  const char* reason = sw.reason == SwitchReason::measure_fails ? "measure_fails"
                       : sw.reason == SwitchReason::s_exceeds   ? "s_exceeds"
                       : sw.reason == SwitchReason::both        ? "both"
                                                                : "exhausted";
  os << "# switching: n0 = " << sw.n0 << ", reason = " << reason
     << ", R = " << sw.R_n0 << ", mu = " << sw.mu_n0 << '\n';
}

inline nlohmann::json certificate_json(const HolderCertificate& cert) {
  nlohmann::json j;
  j["alpha_fit"] = cert.alpha_fit;
  j["worst_C"] = cert.worst_C;
  j["a_exp"] = cert.a_exp;
  j["far_bound_holds"] = cert.far_bound_holds;
  j["far_worst_ratio"] = cert.far_worst_ratio;
  j["excluded_pairs"] = cert.excluded_pairs;
  j["dropped_bins"] = cert.dropped_bins;
  j["cases"] = nlohmann::json::array();
  for (const auto& [key, tab] : cert.cases) {
    nlohmann::json jc;
    const int cls = key / 3;
    jc["class"] = cls == 0 ? "time" : cls == 1 ? "space" : "far";
    jc["subcase"] = key % 3;
    jc["count"] = tab.count;
    jc["excluded"] = tab.excluded;
    jc["worst_quotient"] = tab.worst_quotient;
    j["cases"].push_back(jc);
  }
  j["bins"] = nlohmann::json::array();
  for (std::size_t i = 0; i < cert.bin_log_d.size(); ++i) {
    nlohmann::json jb;
    jb["log_d"] = cert.bin_log_d[i];
    jb["log_q"] = cert.bin_log_q[i];
    j["bins"].push_back(jb);
  }
  return j;
}

inline void write_certificate_json(const std::string& path,
                                   const HolderCertificate& cert) {
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("write_certificate_json: cannot open " + path);
  os << certificate_json(cert).dump(2) << '\n';
}

}  // namespace plreg
