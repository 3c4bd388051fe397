#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace plreg {

struct CheckRecord {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double empirical_c = 0.0;
  bool pass = false;
  std::string detail;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<CheckRecord> checks;
  double wall_ms = 0.0;

  bool aggregate_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  void add(std::string name, double lhs, double rhs, double c, bool pass,
           std::string detail = "") {
    checks.push_back(
        {std::move(name), lhs, rhs, c, pass, std::move(detail)});
  }

  nlohmann::json to_json(bool include_wall_time = true) const {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["config_digest"] = config_digest;
    j["aggregate_pass"] = aggregate_pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
      nlohmann::json jc;
      jc["name"] = c.name;
      jc["lhs"] = c.lhs;
      jc["rhs"] = c.rhs;
      jc["empirical_c"] = c.empirical_c;
      jc["pass"] = c.pass;
      jc["detail"] = c.detail;
      j["checks"].push_back(jc);
    }
    if (include_wall_time) j["wall_ms"] = wall_ms;
    return j;
  }

  void write_json(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("RunReport: cannot open " + path);
    os << to_json().dump(2) << '\n';
  }

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("RunReport: cannot open " + path);
    os << std::setprecision(17);
    os << "name,lhs,rhs,empirical_c,pass\n";
    for (const auto& c : checks)
      os << c.name << ',' << c.lhs << ',' << c.rhs << ',' << c.empirical_c
         << ',' << (c.pass ? 1 : 0) << '\n';
  }
};

inline RunReport read_report(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_report: cannot open " + path);
  nlohmann::json j;
  is >> j;
  RunReport rep;
  rep.scenario = j.value("scenario", "");
  rep.seed = j.value("seed", std::uint64_t{0});
  rep.config_digest = j.value("config_digest", "");
  rep.wall_ms = j.value("wall_ms", 0.0);
  for (const auto& jc : j.at("checks"))
    rep.checks.push_back({jc.value("name", ""), jc.value("lhs", 0.0),
                          jc.value("rhs", 0.0), jc.value("empirical_c", 0.0),
                          jc.value("pass", false), jc.value("detail", "")});
  return rep;
}

}  // namespace plreg
