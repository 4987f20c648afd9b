#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace gwcli {

namespace {

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::stringstream is(item);
    T v;
    if (!(is >> v)) throw std::invalid_argument("bad list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("bad boolean '" + s + "'");
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  if (cutoff && (*cutoff < 0 || *cutoff > 4096)) fail("cutoff must lie in [0, 4096]");
  for (double l : lambdas)
    if (!std::isfinite(l) || l < 0.0) fail("couplings must be finite and non-negative");
  if (scale_bases.empty()) fail("at least one scale base is required");
  for (int m : scale_bases)
    if (m < 2 || m > 16) fail("scale base must lie in [2, 16]");
  if (!(rho > 0.0 && rho < 1.0)) fail("rho must lie in (0, 1)");
  if (order < 1 || order > 4) fail("order must lie in [1, 4]");
  if (j_max < 0 || j_max > 12) fail("j_max must lie in [0, 12]");
  if (q_kernel_j_max < 0 || q_kernel_j_max > 9) fail("q_kernel_j_max must lie in [0, 9]");
  if (count_two_level < 0 || count_two_level > 40) fail("count_two_level must lie in [0, 40]");
  if (samples < 2 || order2_samples < 2 || resolvent_samples < 2) fail("sample counts must be at least 2");
  if (!(se_multiplier > 0.0)) fail("se_multiplier must be positive");
  if (!(quadrature_tolerance > 0.0) || !(derivative_tolerance > 0.0) || !(resum_tolerance > 0.0))
    fail("tolerances must be positive");
  if (output_dir.empty()) fail("output directory must be non-empty");
}

std::string RunConfig::canonical() const {
  std::ostringstream o;
  o << "cutoff=" << (cutoff ? std::to_string(*cutoff) : "default") << ';';
  o << "lambdas=";
  for (double l : lambdas) o << num(l) << ',';
  o << ";bases=";
  for (int m : scale_bases) o << m << ',';
  o << ";rho=" << num(rho) << ";order=" << order << ";j_max=" << j_max << ";q_j_max=" << q_kernel_j_max
    << ";two_level=" << count_two_level << ";samples=" << samples << ";order2_samples=" << order2_samples
    << ";resolvent_samples=" << resolvent_samples << ";seed=" << seed << ";se=" << num(se_multiplier)
    << ";quad=" << num(quadrature_tolerance) << ";deriv=" << num(derivative_tolerance)
    << ";resum=" << num(resum_tolerance);
  return o.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string RunConfig::hash() const { return hex64(fnv1a(canonical())); }

void load_ini(const std::string& path, RunConfig& cfg) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument(std::string("cannot read config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw std::invalid_argument("config key '" + section + "' must sit inside a section");
    for (const auto& [key, node] : body) {
      const std::string v = node.data();
      const std::string k = section + "." + key;
      if (k == "model.cutoff") cfg.cutoff = std::stoi(v);
      else if (k == "model.lambda") cfg.lambdas = parse_list<double>(v);
      else if (k == "model.scale_base") cfg.scale_bases = parse_list<int>(v);
      else if (k == "model.rho") cfg.rho = std::stod(v);
      else if (k == "model.order") cfg.order = std::stoi(v);
      else if (k == "model.j_max") cfg.j_max = std::stoi(v);
      else if (k == "model.q_kernel_j_max") cfg.q_kernel_j_max = std::stoi(v);
      else if (k == "model.count_two_level") cfg.count_two_level = std::stoi(v);
      else if (k == "sampling.samples") cfg.samples = std::stol(v);
      else if (k == "sampling.order2_samples") cfg.order2_samples = std::stol(v);
      else if (k == "sampling.resolvent_samples") cfg.resolvent_samples = std::stol(v);
      else if (k == "sampling.seed") cfg.seed = std::stoull(v);
      else if (k == "tolerance.se_multiplier") cfg.se_multiplier = std::stod(v);
      else if (k == "tolerance.quadrature") cfg.quadrature_tolerance = std::stod(v);
      else if (k == "tolerance.derivative") cfg.derivative_tolerance = std::stod(v);
      else if (k == "tolerance.resum") cfg.resum_tolerance = std::stod(v);
      else if (k == "output.dir") cfg.output_dir = v;
      else if (k == "output.cache_dir") cfg.cache_dir = v;
      else if (k == "output.csv") cfg.csv = parse_bool(v);
      else if (k == "output.plots") cfg.plots = parse_bool(v);
      else throw std::invalid_argument("unknown config key '" + k + "'");
    }
  }
}

}  // namespace gwcli
