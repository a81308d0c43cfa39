#include "hat/config.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "hat/error.hpp"
#include "hat/io.hpp"

namespace hat {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw Error(ErrorCode::Config, "config key '" + std::string(key) + "': '" + std::string(value) +
                                     "' is not " + expected);
}

double to_real(std::string_view key, std::string_view value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(v)) {
    bad_value(key, value, "a real number");
  }
  return v;
}

std::uint64_t to_count(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    bad_value(key, value, "a non-negative integer");
  }
  return v;
}

bool to_flag(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

std::string flag(bool b) { return b ? "true" : "false"; }

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::Parse, "config line " + std::to_string(line_no) + ": missing '='",
                    line_no);
      }
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key.empty()) {
        throw Error(ErrorCode::Parse, "config line " + std::to_string(line_no) + ": empty key",
                    line_no);
      }
      out.emplace_back(std::string(key), std::string(value));
    }
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

KeyValues read_key_value_file(const std::filesystem::path& path) {
  return parse_key_values(read_text_file(path));
}

std::pair<std::string, std::string> parse_assignment(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || trim(text.substr(0, eq)).empty()) {
    throw Error(ErrorCode::Config, "expected key=value, got '" + std::string(text) + "'");
  }
  return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

void apply_setting(TrackerConfig& c, std::string_view key, std::string_view value) {
  if (key == "tau_det") c.tau_det = to_real(key, value);
  else if (key == "tau_sim") c.tau_sim = to_real(key, value);
  else if (key == "tau_new") c.tau_new = to_real(key, value);
  else if (key == "tau_miss") {
    const auto v = to_count(key, value);
    if (v > std::numeric_limits<std::uint32_t>::max()) bad_value(key, value, "in range");
    c.tau_miss = static_cast<std::uint32_t>(v);
  }
  else if (key == "T") c.queue_length = to_count(key, value);
  else if (key == "lambda0") c.lambda0 = to_real(key, value);
  else if (key == "alpha") c.alpha = to_real(key, value);
  else if (key == "alpha_ema") c.alpha_ema = to_real(key, value);
  else if (key == "epsilon") c.epsilon = to_real(key, value);
  else if (key == "refit_stride") c.refit_stride = to_count(key, value);
  else if (key == "use_projection") c.use_projection = to_flag(key, value);
  else if (key == "projection_kind") {
    if (value == "fld") c.projection_kind = ProjectionChoice::Fld;
    else if (value == "pca") c.projection_kind = ProjectionChoice::Pca;
    else if (value == "none") c.projection_kind = ProjectionChoice::None;
    else bad_value(key, value, "one of fld, pca, none");
  } else if (key == "centroid") {
    if (value == "temporal") c.centroid = CentroidMode::TemporalShifted;
    else if (value == "plain") c.centroid = CentroidMode::Plain;
    else bad_value(key, value, "one of temporal, plain");
  } else {
    throw Error(ErrorCode::Config, "unknown tracker config key '" + std::string(key) + "'");
  }
}

void apply_setting(SynthConfig& c, std::string_view key, std::string_view value) {
  if (key == "num_ids") c.num_ids = to_count(key, value);
  else if (key == "num_frames") c.num_frames = to_count(key, value);
  else if (key == "dim") c.dim = to_count(key, value);
  else if (key == "cone_angle_deg") c.cone_angle_deg = to_real(key, value);
  else if (key == "drift_step") c.drift_step = to_real(key, value);
  else if (key == "noise_sigma") c.noise_sigma = to_real(key, value);
  else if (key == "nuisance_rank") c.nuisance_rank = to_count(key, value);
  else if (key == "nuisance_gain") c.nuisance_gain = to_real(key, value);
  else if (key == "occlusion_prob") c.occlusion_prob = to_real(key, value);
  else if (key == "occlusion_len_min") c.occlusion_len.first = to_count(key, value);
  else if (key == "occlusion_len_max") c.occlusion_len.second = to_count(key, value);
  else if (key == "det_conf_min") c.det_conf.first = to_real(key, value);
  else if (key == "det_conf_max") c.det_conf.second = to_real(key, value);
  else if (key == "frame_width") c.frame_width = to_real(key, value);
  else if (key == "frame_height") c.frame_height = to_real(key, value);
  else if (key == "seed") c.seed = to_count(key, value);
  else throw Error(ErrorCode::Config, "unknown synth config key '" + std::string(key) + "'");
}

KeyValues describe(const TrackerConfig& c) {
  const char* kind = c.projection_kind == ProjectionChoice::Fld   ? "fld"
                     : c.projection_kind == ProjectionChoice::Pca ? "pca"
                                                                  : "none";
  return {
      {"tau_det", format_number(c.tau_det)},
      {"tau_sim", format_number(c.tau_sim)},
      {"tau_new", format_number(c.tau_new)},
      {"tau_miss", std::to_string(c.tau_miss)},
      {"T", std::to_string(c.queue_length)},
      {"lambda0", format_number(c.lambda0)},
      {"alpha", format_number(c.alpha)},
      {"alpha_ema", format_number(c.alpha_ema)},
      {"epsilon", format_number(c.epsilon)},
      {"refit_stride", std::to_string(c.refit_stride)},
      {"use_projection", flag(c.use_projection)},
      {"projection_kind", kind},
      {"centroid", c.centroid == CentroidMode::Plain ? "plain" : "temporal"},
  };
}

KeyValues describe(const SynthConfig& c) {
  return {
      {"num_ids", std::to_string(c.num_ids)},
      {"num_frames", std::to_string(c.num_frames)},
      {"dim", std::to_string(c.dim)},
      {"cone_angle_deg", format_number(c.cone_angle_deg)},
      {"drift_step", format_number(c.drift_step)},
      {"noise_sigma", format_number(c.noise_sigma)},
      {"nuisance_rank", std::to_string(c.nuisance_rank)},
      {"nuisance_gain", format_number(c.nuisance_gain)},
      {"occlusion_prob", format_number(c.occlusion_prob)},
      {"occlusion_len_min", std::to_string(c.occlusion_len.first)},
      {"occlusion_len_max", std::to_string(c.occlusion_len.second)},
      {"det_conf_min", format_number(c.det_conf.first)},
      {"det_conf_max", format_number(c.det_conf.second)},
      {"frame_width", format_number(c.frame_width)},
      {"frame_height", format_number(c.frame_height)},
      {"seed", std::to_string(c.seed)},
  };
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + '=' + v + '\n';
  return out;
}

}  // namespace hat
