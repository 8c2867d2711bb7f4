#include "warpq/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace warpq {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorKind::kInvalidArgument, "config: bad value for " + key + ": '" + raw + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

StepSet parse_step_set(const std::string& text) {
  StepSet set;
  for (const std::string& part : split(text, ';')) {
    if (part.empty()) continue;
    const auto f = split(part, ',');
    if (f.size() != 2 && f.size() != 4)
      throw Error(ErrorKind::kInvalidArgument, "step '" + part + "': expected r,c or r,c,mul,add");
    Step step;
    step.rows = parse_number<int>("steps", f[0]);
    step.cols = parse_number<int>("steps", f[1]);
    if (f.size() == 4) {
      step.mul = parse_number<double>("steps", f[2]);
      step.add = parse_number<double>("steps", f[3]);
    }
    set.steps.push_back(step);
  }
  set.validate();
  return set;
}

std::string format_step_set(const StepSet& steps) {
  std::ostringstream out;
  for (std::size_t i = 0; i < steps.steps.size(); ++i) {
    const Step& s = steps.steps[i];
    if (i) out << ';';
    out << s.rows << ',' << s.cols;
    if (s.mul != 1.0 || s.add != 0.0) out << ',' << s.mul << ',' << s.add;
  }
  return out.str();
}

void apply_config_value(WarpQConfig& config, const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  if (key == "patch_frames") config.patch_frames = parse_number<Eigen::Index>(key, value);
  else if (key == "patch_overlap") config.patch_overlap = parse_number<double>(key, value);
  else if (key == "n_mfcc") config.n_mfcc = parse_number<int>(key, value);
  else if (key == "f_max") config.f_max_hz = parse_number<double>(key, value);
  else if (key == "window_ms") config.window_ms = parse_number<int>(key, value);
  else if (key == "hop_ms") config.hop_ms = parse_number<int>(key, value);
  else if (key == "lifter") config.lifter = parse_number<int>(key, value);
  else if (key == "vad_frame_ms") config.vad.frame_ms = parse_number<int>(key, value);
  else if (key == "vad_aggressiveness") config.vad.aggressiveness = parse_number<int>(key, value);
  else if (key == "steps") config.steps = parse_step_set(value);
  else throw Error(ErrorKind::kInvalidArgument, "config: unknown key '" + key + "'");
}

void apply_config_file(WarpQConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read config " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::kInvalidArgument,
                  path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    apply_config_value(config, s.substr(0, eq), s.substr(eq + 1));
  }
}

}  // namespace warpq
