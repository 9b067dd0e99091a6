#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "duality/coplanar.hpp"
#include "duality/measures.hpp"
#include "duality/qcore.hpp"

namespace duality::io {

/// Input that cannot be parsed or fails validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem-level failure: unreadable input or unwritable output.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParsedConfig {
  BeamDetectorConfig config;
  std::optional<Measurement> measurement;
};

/// JSON configuration: n_beams, populations, detector (bloch_vectors or
/// amplitudes), optional measurement (beta/gamma angles or projectors).
ParsedConfig parse_config_text(const std::string& text);
ParsedConfig load_config_file(const std::filesystem::path& path);

/// Serialization that round-trips through parse_config_text.
std::string config_to_json(const BeamDetectorConfig& cfg);

/// Angle literals: plain radians ("1.57"), "pi", "2pi/3", "0.5pi", "pi/4".
double parse_angle(std::string_view text);

/// Locale-independent float text, 17 significant digits.
std::string format_value(double v);
double parse_value(std::string_view text);

std::string branch_name(coplanar::Branch b);

std::string render_sweep_csv(const std::vector<coplanar::SweepRow>& rows);
std::vector<coplanar::SweepRow> parse_sweep_csv(const std::string& text);
std::string render_sweep_svg(const std::vector<coplanar::SweepRow>& rows);

std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_string(std::string_view bytes);

struct OutputRecord {
  std::string path;
  std::string digest;
};

/// Provenance record written alongside each output file set.
struct RunManifest {
  std::string tool = "duality";
  std::string tool_version;
  std::vector<std::string> command_line;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string timestamp_utc;
  std::vector<OutputRecord> outputs;
};

std::string render_manifest_json(const RunManifest& m);
std::string utc_timestamp_now();

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace duality::io
