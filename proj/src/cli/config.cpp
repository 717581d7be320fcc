#include "ufslam/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ufslam::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(const Assignment& a, const std::string& what) {
  throw ConfigError(a.key + ": " + what + " (got '" + a.value + "'" +
                    (a.origin.empty() ? "" : ", from " + a.origin) + ")");
}

double to_double(const Assignment& a) {
  double out = 0.0;
  const char* end = a.value.data() + a.value.size();
  const auto [ptr, ec] = std::from_chars(a.value.data(), end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out)) fail(a, "expected a finite number");
  return out;
}

long long to_integer(const Assignment& a) {
  long long out = 0;
  const char* end = a.value.data() + a.value.size();
  const auto [ptr, ec] = std::from_chars(a.value.data(), end, out);
  if (ec != std::errc{} || ptr != end) fail(a, "expected an integer");
  return out;
}

bool to_bool(const Assignment& a) {
  if (a.value == "true" || a.value == "1") return true;
  if (a.value == "false" || a.value == "0") return false;
  fail(a, "expected true or false");
}

using Setter = std::function<void(RunSpec&, const Assignment&)>;

// Noise keys set the truth and the filter's assumption together; the
// filter.* variants change only the assumption.
const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table{
      {"scenario", [](RunSpec&, const Assignment&) {}},  // handled by build_spec
      {"algo", [](RunSpec& s, const Assignment& a) {
         try {
           s.algorithm = algorithm_from_string(a.value);
         } catch (const std::invalid_argument&) {
           fail(a, "expected ufastslam or fastslam2");
         }
       }},
      {"particles", [](RunSpec& s, const Assignment& a) {
         const long long m = to_integer(a);
         if (m < 1 || m > 1'000'000) fail(a, "must be in [1, 1000000]");
         s.filter.particle_count = static_cast<int>(m);
       }},
      {"seed", [](RunSpec& s, const Assignment& a) {
         const long long seed = to_integer(a);
         if (seed < 0) fail(a, "must be >= 0");
         s.scenario.seed = static_cast<std::uint64_t>(seed);
         s.filter_seed = static_cast<std::uint64_t>(seed);
       }},
      {"threads", [](RunSpec& s, const Assignment& a) {
         const long long t = to_integer(a);
         if (t < 1 || t > 1024) fail(a, "must be in [1, 1024]");
         s.filter.threads = static_cast<int>(t);
       }},
      {"sensor.sigma_r", [](RunSpec& s, const Assignment& a) {
         s.scenario.sensor_noise.sigma_r = s.filter.sensor.sigma_r = to_double(a);
       }},
      {"sensor.sigma_phi", [](RunSpec& s, const Assignment& a) {
         s.scenario.sensor_noise.sigma_phi = s.filter.sensor.sigma_phi = to_double(a);
       }},
      {"sensor.max_range", [](RunSpec& s, const Assignment& a) { s.scenario.max_range = to_double(a); }},
      {"sensor.fov", [](RunSpec& s, const Assignment& a) { s.scenario.fov = to_double(a); }},
      {"motion.a1", [](RunSpec& s, const Assignment& a) { s.scenario.motion_noise.a1 = s.filter.motion.a1 = to_double(a); }},
      {"motion.a2", [](RunSpec& s, const Assignment& a) { s.scenario.motion_noise.a2 = s.filter.motion.a2 = to_double(a); }},
      {"motion.a3", [](RunSpec& s, const Assignment& a) { s.scenario.motion_noise.a3 = s.filter.motion.a3 = to_double(a); }},
      {"motion.a4", [](RunSpec& s, const Assignment& a) { s.scenario.motion_noise.a4 = s.filter.motion.a4 = to_double(a); }},
      {"sim.dt", [](RunSpec& s, const Assignment& a) { s.scenario.dt = to_double(a); }},
      {"sim.speed", [](RunSpec& s, const Assignment& a) { s.scenario.speed = to_double(a); }},
      {"sim.turn_gain", [](RunSpec& s, const Assignment& a) { s.scenario.turn_gain = to_double(a); }},
      {"sim.inject_noise", [](RunSpec& s, const Assignment& a) { s.inject_noise = to_bool(a); }},
      {"filter.sensor.sigma_r", [](RunSpec& s, const Assignment& a) { s.filter.sensor.sigma_r = to_double(a); }},
      {"filter.sensor.sigma_phi", [](RunSpec& s, const Assignment& a) { s.filter.sensor.sigma_phi = to_double(a); }},
      {"filter.motion.a1", [](RunSpec& s, const Assignment& a) { s.filter.motion.a1 = to_double(a); }},
      {"filter.motion.a2", [](RunSpec& s, const Assignment& a) { s.filter.motion.a2 = to_double(a); }},
      {"filter.motion.a3", [](RunSpec& s, const Assignment& a) { s.filter.motion.a3 = to_double(a); }},
      {"filter.motion.a4", [](RunSpec& s, const Assignment& a) { s.filter.motion.a4 = to_double(a); }},
      {"filter.resample_fraction", [](RunSpec& s, const Assignment& a) { s.filter.resample_fraction = to_double(a); }},
      {"filter.weight_form", [](RunSpec& s, const Assignment& a) {
         try {
           s.filter.weight_form = weight_form_from_string(a.value);
         } catch (const std::invalid_argument&) {
           fail(a, "expected unscented or jacobian");
         }
       }},
      {"filter.weight_includes_pose_innovation",
       [](RunSpec& s, const Assignment& a) { s.filter.weight_includes_pose_innovation = to_bool(a); }},
      {"filter.pose_covariance", [](RunSpec& s, const Assignment& a) {
         try {
           s.filter.pose_covariance = pose_covariance_from_string(a.value);
         } catch (const std::invalid_argument&) {
           fail(a, "expected retain or reset");
         }
       }},
      {"filter.refine_with_landmark_cov",
       [](RunSpec& s, const Assignment& a) { s.filter.refine_with_landmark_cov = to_bool(a); }},
      {"ut.alpha", [](RunSpec& s, const Assignment& a) { s.filter.ut.alpha = to_double(a); }},
      {"ut.kappa", [](RunSpec& s, const Assignment& a) { s.filter.ut.kappa = to_double(a); }},
      {"ut.beta", [](RunSpec& s, const Assignment& a) { s.filter.ut.beta = to_double(a); }},
  };
  return table;
}

const Setter* find_setter(const std::string& key) {
  for (const auto& [name, setter] : setters()) {
    if (name == key) return &setter;
  }
  return nullptr;
}

}  // namespace

std::vector<Assignment> parse_config_text(const std::string& text, const std::string& origin) {
  std::vector<Assignment> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = origin + ":" + std::to_string(number);
    if (eq == std::string::npos) throw ConfigError(body + ": expected 'key = value' (" + where + ")");
    Assignment a{trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)), where};
    if (a.key.empty()) throw ConfigError("(empty key): expected 'key = value' (" + where + ")");
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<Assignment> load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path.string());
}

Assignment parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError(text + ": expected key=value");
  return {trim(std::string_view(text).substr(0, eq)), trim(std::string_view(text).substr(eq + 1)), "--set"};
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& entry : setters()) k.push_back(entry.first);
    return k;
  }();
  return keys;
}

void apply(RunSpec& spec, const Assignment& a) {
  const Setter* setter = find_setter(a.key);
  if (!setter) throw ConfigError(a.key + ": unknown configuration key" + (a.origin.empty() ? "" : " (" + a.origin + ")"));
  (*setter)(spec, a);
}

RunSpec build_spec(const std::vector<Assignment>& assignments, const std::string& fallback_scenario) {
  std::string scenario = fallback_scenario;
  for (const Assignment& a : assignments) {
    if (a.key == "scenario") scenario = a.value;
  }
  RunSpec spec;
  try {
    spec = default_spec(scenario, Algorithm::ufastslam, 100, 0);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario: unknown preset '") + scenario + "'");
  }
  for (const Assignment& a : assignments) apply(spec, a);
  try {
    spec.scenario.validate();
    spec.filter.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

}  // namespace ufslam::cli
