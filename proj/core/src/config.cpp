#include "sbtrans/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sbtrans {

int RunConfig::effective_threads() const {
  int n = threads;
  if (n <= 0) {
    if (const char* env = std::getenv("ASGS_THREADS")) n = std::atoi(env);
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  }
  if (const char* env = std::getenv("ASGS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::clamp(n, 1, 16);
}

std::map<std::string, std::string> parse_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::vector<int> parse_grid_list(const std::string& csv) {
  std::vector<int> grids;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    grids.push_back(std::stoi(item));
  }
  if (grids.empty()) throw std::invalid_argument("grid list is empty");
  for (size_t i = 0; i < grids.size(); ++i) {
    if (grids[i] < 2) throw std::invalid_argument("grids must be at least 2");
    if (i > 0 && grids[i] <= grids[i - 1])
      throw std::invalid_argument("grids must be strictly ascending");
  }
  return grids;
}

namespace {

bool to_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw std::invalid_argument("expected boolean, got '" + v + "'");
}

}  // namespace

void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "case") cfg.case_name = value;
    else if (key == "method") cfg.method = value;
    else if (key == "grids") cfg.grids = parse_grid_list(value);
    else if (key == "theta") cfg.theta = std::stod(value);
    else if (key == "t_final") cfg.T = std::stod(value);
    else if (key == "dt") cfg.dt_override = std::stod(value);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "probe_x") cfg.probe_x = std::stod(value);
    else if (key == "probe_y") cfg.probe_y = std::stod(value);
    else if (key == "pin_pressure") cfg.pin_pressure = to_bool(value);
    else if (key == "picard") cfg.picard = to_bool(value);
    else if (key == "picard_tol") cfg.picard_tol = std::stod(value);
    else if (key == "picard_max") cfg.picard_max_iterations = std::stoi(value);
    else if (key == "interface_split") cfg.interface_split = std::stod(value);
    else if (key == "velocity_order") cfg.velocity_order = std::stoi(value);
    else if (key == "concentration_order") cfg.concentration_order = std::stoi(value);
    else if (key == "quadrature_degree") cfg.quadrature_degree = std::stoi(value);
    else if (key == "threads") cfg.threads = std::stoi(value);
    else if (key == "parallel_grids") cfg.parallel_grids = to_bool(value);
    else if (key == "stabilization.mode" || key == "stab_mode") {
      if (value == "section5") cfg.stab_mode = StabilizationMode::Section5;
      else if (value == "eq9") cfg.stab_mode = StabilizationMode::Eq9;
      else throw std::invalid_argument("unknown stabilization mode '" + value + "'");
    }
    else if (key == "stabilization.tau3_scale") cfg.stab_constants.tau3_scale = std::stod(value);
    else if (key == "stabilization.c1_u") cfg.stab_constants.c1_u = std::stod(value);
    else if (key == "stabilization.c2_u") cfg.stab_constants.c2_u = std::stod(value);
    else if (key == "stabilization.c1_p") cfg.stab_constants.c1_p = std::stod(value);
    else if (key == "stabilization.advective_scale_U")
      cfg.stab_constants.advective_scale_U = std::stod(value);
    else if (key == "stabilization.diffusive_scale_D")
      cfg.stab_constants.diffusive_scale_D = std::stod(value);
    else if (key == "stabilization.series_terms") cfg.series_terms = std::stoi(value);
    else if (key == "solver.tol") cfg.solver.tol = std::stod(value);
    else if (key == "solver.restart") cfg.solver.restart = std::stoi(value);
    else if (key == "solver.max_iterations") cfg.solver.max_iterations = std::stoi(value);
    else if (key == "coeff.D1") cfg.const_D1 = std::stod(value);
    else if (key == "coeff.D2") cfg.const_D2 = std::stod(value);
    else if (key == "coeff.sigma") cfg.override_sigma = std::stod(value);
    else if (key == "coeff.alpha") cfg.override_alpha = std::stod(value);
    else if (key == "coeff.phi") cfg.override_phi = std::stod(value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

}  // namespace sbtrans
