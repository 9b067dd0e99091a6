#include "duality/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>
#include <utility>

#include "duality/distinguishability.hpp"
#include "duality/version.hpp"

namespace duality::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string location_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

/// Best-effort source line of a field, for validation messages.
std::string line_of_field(const std::string& text, const std::string& field) {
  std::string key = field;
  const std::size_t dot = key.rfind('.');
  if (dot != std::string::npos) key = key.substr(dot + 1);
  const std::size_t pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return "";
  std::size_t line = 1;
  for (std::size_t i = 0; i < pos; ++i) {
    if (text[i] == '\n') ++line;
  }
  return "line " + std::to_string(line) + ": ";
}

[[noreturn]] void fail_field(const std::string& text, const std::string& field,
                             const std::string& message) {
  throw ConfigError(line_of_field(text, field) + "field '" + field + "': " + message);
}

double require_number(const std::string& text, const json& v, const std::string& field) {
  if (!v.is_number()) fail_field(text, field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail_field(text, field, "must be finite");
  return x;
}

std::complex<double> require_complex_pair(const std::string& text, const json& v,
                                          const std::string& field) {
  if (!v.is_array() || v.size() != 2) fail_field(text, field, "expected a [re, im] pair");
  return {require_number(text, v[0], field), require_number(text, v[1], field)};
}

Eigen::MatrixXcd require_matrix(const std::string& text, const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) fail_field(text, field, "expected a non-empty matrix");
  const std::size_t d = v.size();
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r) {
    if (!v[r].is_array() || v[r].size() != d) fail_field(text, field, "matrix must be square");
    for (std::size_t c = 0; c < d; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          require_complex_pair(text, v[r][c], field);
    }
  }
  return m;
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.what() leads with a bracketed exception id and repeats the location;
    // keep just the human-readable tail.
    std::string detail = e.what();
    const std::size_t colon = detail.find(": syntax error");
    if (colon != std::string::npos) detail = detail.substr(colon + 2);
    throw ConfigError("parse error at " + location_of(text, e.byte) + ": " + detail);
  }
  if (!doc.is_object()) {
    throw ConfigError("config must be a JSON object");
  }

  if (!doc.contains("n_beams") || !doc["n_beams"].is_number_integer()) {
    fail_field(text, "n_beams", "required integer");
  }
  const long long n_raw = doc["n_beams"].get<long long>();
  if (n_raw < 1 || n_raw > 64) fail_field(text, "n_beams", "must lie in [1, 64]");
  const std::size_t n = static_cast<std::size_t>(n_raw);

  if (!doc.contains("populations") || !doc["populations"].is_array()) {
    fail_field(text, "populations", "required array");
  }
  if (doc["populations"].size() != n) {
    fail_field(text, "populations", "length must equal n_beams");
  }
  std::vector<double> zeta;
  zeta.reserve(n);
  for (const json& z : doc["populations"]) {
    zeta.push_back(require_number(text, z, "populations"));
  }

  if (!doc.contains("detector") || !doc["detector"].is_object()) {
    fail_field(text, "detector", "required object");
  }
  const json& det = doc["detector"];
  const bool has_bloch = det.contains("bloch_vectors");
  const bool has_amps = det.contains("amplitudes");
  if (has_bloch == has_amps) {
    fail_field(text, "detector", "needs exactly one of 'bloch_vectors' or 'amplitudes'");
  }

  std::vector<DetectorState> states;
  states.reserve(n);
  if (has_bloch) {
    const json& vs = det["bloch_vectors"];
    if (!vs.is_array() || vs.size() != n) {
      fail_field(text, "detector.bloch_vectors", "expected one [x, y, z] entry per beam");
    }
    for (const json& v : vs) {
      if (!v.is_array() || v.size() != 3) {
        fail_field(text, "detector.bloch_vectors", "each entry must be [x, y, z]");
      }
      const BlochVector b{require_number(text, v[0], "detector.bloch_vectors"),
                          require_number(text, v[1], "detector.bloch_vectors"),
                          require_number(text, v[2], "detector.bloch_vectors")};
      try {
        states.push_back(bloch_to_state(b));
      } catch (const std::invalid_argument& e) {
        fail_field(text, "detector.bloch_vectors", e.what());
      }
    }
  } else {
    const json& vs = det["amplitudes"];
    if (!vs.is_array() || vs.size() != n) {
      fail_field(text, "detector.amplitudes", "expected one amplitude list per beam");
    }
    for (const json& v : vs) {
      if (!v.is_array() || v.empty()) {
        fail_field(text, "detector.amplitudes", "each state needs at least one [re, im] pair");
      }
      Eigen::VectorXcd a(static_cast<Eigen::Index>(v.size()));
      for (std::size_t k = 0; k < v.size(); ++k) {
        a(static_cast<Eigen::Index>(k)) = require_complex_pair(text, v[k], "detector.amplitudes");
      }
      try {
        states.emplace_back(std::move(a));
      } catch (const std::invalid_argument& e) {
        fail_field(text, "detector.amplitudes", e.what());
      }
    }
  }

  ParsedConfig out{
      [&]() -> BeamDetectorConfig {
        try {
          return BeamDetectorConfig(PopulationVector(std::move(zeta)), std::move(states));
        } catch (const std::invalid_argument& e) {
          fail_field(text, "populations", e.what());
        }
      }(),
      std::nullopt};

  if (doc.contains("measurement")) {
    const json& meas = doc["measurement"];
    if (!meas.is_object()) fail_field(text, "measurement", "expected an object");
    const bool has_angles = meas.contains("beta") || meas.contains("gamma");
    const bool has_projectors = meas.contains("projectors");
    if (has_angles == has_projectors) {
      fail_field(text, "measurement", "needs either 'beta'/'gamma' angles or 'projectors'");
    }
    if (has_angles) {
      if (!meas.contains("beta") || !meas.contains("gamma")) {
        fail_field(text, "measurement", "needs both 'beta' and 'gamma'");
      }
      if (out.config.detector_dim() != 2) {
        fail_field(text, "measurement", "angle form requires 2-dimensional detector states");
      }
      const double beta = require_number(text, meas["beta"], "measurement.beta");
      const double gamma = require_number(text, meas["gamma"], "measurement.gamma");
      out.measurement = observable_to_measurement(canonical_observable(beta, gamma));
    } else {
      const json& ps = meas["projectors"];
      if (!ps.is_array() || ps.empty()) {
        fail_field(text, "measurement.projectors", "expected a non-empty array of matrices");
      }
      std::vector<Eigen::MatrixXcd> projectors;
      projectors.reserve(ps.size());
      for (const json& p : ps) {
        projectors.push_back(require_matrix(text, p, "measurement.projectors"));
      }
      try {
        out.measurement.emplace(std::move(projectors));
      } catch (const std::invalid_argument& e) {
        fail_field(text, "measurement.projectors", e.what());
      }
      if (out.measurement->dim() != out.config.detector_dim()) {
        fail_field(text, "measurement.projectors", "dimension must match the detector states");
      }
    }
  }
  return out;
}

ParsedConfig load_config_file(const std::filesystem::path& path) {
  return parse_config_text(read_text_file(path));
}

std::string config_to_json(const BeamDetectorConfig& cfg) {
  ordered_json doc;
  doc["n_beams"] = cfg.beam_count();
  doc["populations"] = cfg.populations().values();
  ordered_json amps = ordered_json::array();
  for (const DetectorState& s : cfg.detector_states()) {
    ordered_json state = ordered_json::array();
    for (Eigen::Index k = 0; k < s.dim(); ++k) {
      state.push_back({s.amplitudes()(k).real(), s.amplitudes()(k).imag()});
    }
    amps.push_back(std::move(state));
  }
  doc["detector"] = ordered_json{{"amplitudes", std::move(amps)}};
  return doc.dump();
}

double parse_angle(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw std::invalid_argument("parse_angle: empty angle");

  const std::size_t pi_pos = s.find("pi");
  if (pi_pos == std::string::npos) {
    return parse_value(s);
  }
  double coef = 1.0;
  const std::string prefix = s.substr(0, pi_pos);
  if (prefix == "-") {
    coef = -1.0;
  } else if (!prefix.empty()) {
    coef = parse_value(prefix);
  }
  double denom = 1.0;
  const std::string suffix = s.substr(pi_pos + 2);
  if (!suffix.empty()) {
    if (suffix[0] != '/' || suffix.size() < 2) {
      throw std::invalid_argument("parse_angle: expected '<coef>pi[/<denom>]', got '" +
                                  std::string(text) + "'");
    }
    denom = parse_value(suffix.substr(1));
    if (denom == 0.0) throw std::invalid_argument("parse_angle: zero denominator");
  }
  return coef * std::numbers::pi / denom;
}

std::string format_value(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_value(std::string_view text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw std::invalid_argument("parse_value: not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string branch_name(coplanar::Branch b) {
  switch (b) {
    case coplanar::Branch::sigma_x:
      return "sigma_x";
    case coplanar::Branch::sigma_z:
      return "sigma_z";
    case coplanar::Branch::crossover:
      return "crossover";
  }
  throw std::invalid_argument("branch_name: unknown branch");
}

std::string render_sweep_csv(const std::vector<coplanar::SweepRow>& rows) {
  std::string out = "theta,V,D,D2V2,branch,beta_opt,gamma_opt\n";
  for (const coplanar::SweepRow& r : rows) {
    out += format_value(r.theta);
    out += ',';
    out += format_value(r.visibility);
    out += ',';
    out += format_value(r.distinguishability);
    out += ',';
    out += format_value(r.sum_sq);
    out += ',';
    out += branch_name(r.branch);
    out += ',';
    out += format_value(r.beta_opt);
    out += ',';
    out += format_value(r.gamma_opt);
    out += '\n';
  }
  return out;
}

std::vector<coplanar::SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "theta,V,D,D2V2,branch,beta_opt,gamma_opt") {
    throw ConfigError("parse_sweep_csv: unexpected header");
  }
  std::vector<coplanar::SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7) throw ConfigError("parse_sweep_csv: expected 7 fields per row");
    coplanar::SweepRow row;
    row.theta = parse_value(fields[0]);
    row.visibility = parse_value(fields[1]);
    row.distinguishability = parse_value(fields[2]);
    row.sum_sq = parse_value(fields[3]);
    if (fields[4] == "sigma_x") {
      row.branch = coplanar::Branch::sigma_x;
    } else if (fields[4] == "sigma_z") {
      row.branch = coplanar::Branch::sigma_z;
    } else if (fields[4] == "crossover") {
      row.branch = coplanar::Branch::crossover;
    } else {
      throw ConfigError("parse_sweep_csv: unknown branch '" + fields[4] + "'");
    }
    row.beta_opt = parse_value(fields[5]);
    row.gamma_opt = parse_value(fields[6]);
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string short_label(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string render_sweep_svg(const std::vector<coplanar::SweepRow>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("render_sweep_svg: needs at least 2 rows");
  constexpr double width = 720.0;
  constexpr double height = 480.0;
  constexpr double left = 70.0;
  constexpr double right = 24.0;
  constexpr double top = 24.0;
  constexpr double bottom = 64.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double x_lo = rows.front().theta / std::numbers::pi;
  const double x_hi = rows.back().theta / std::numbers::pi;
  constexpr double y_lo = 0.0;
  constexpr double y_hi = 1.02;

  auto x_of = [&](double theta) {
    return left + (theta / std::numbers::pi - x_lo) / (x_hi - x_lo) * plot_w;
  };
  auto y_of = [&](double value) { return top + (y_hi - value) / (y_hi - y_lo) * plot_h; };

  auto polyline = [&](auto getter, const char* dash, const char* label) {
    std::string points;
    for (const coplanar::SweepRow& r : rows) {
      points += fixed2(x_of(r.theta));
      points += ',';
      points += fixed2(y_of(getter(r)));
      points += ' ';
    }
    if (!points.empty()) points.pop_back();
    std::string elem = "  <polyline fill=\"none\" stroke=\"#1a1a1a\" stroke-width=\"1.6\"";
    if (dash != nullptr) {
      elem += " stroke-dasharray=\"";
      elem += dash;
      elem += "\"";
    }
    elem += " data-series=\"";
    elem += label;
    elem += "\" points=\"";
    elem += points;
    elem += "\"/>\n";
    return elem;
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
         "viewBox=\"0 0 720 480\">\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"720\" height=\"480\" fill=\"#ffffff\"/>\n";

  // Axes.
  svg += "  <line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(top + plot_h) + "\" x2=\"" +
         fixed2(left + plot_w) + "\" y2=\"" + fixed2(top + plot_h) +
         "\" stroke=\"#1a1a1a\" stroke-width=\"1\"/>\n";
  svg += "  <line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(top) + "\" x2=\"" + fixed2(left) +
         "\" y2=\"" + fixed2(top + plot_h) + "\" stroke=\"#1a1a1a\" stroke-width=\"1\"/>\n";

  // Ticks and labels.
  for (int t = 0; t <= 4; ++t) {
    const double frac = x_lo + (x_hi - x_lo) * t / 4.0;
    const double px = left + plot_w * t / 4.0;
    svg += "  <line x1=\"" + fixed2(px) + "\" y1=\"" + fixed2(top + plot_h) + "\" x2=\"" +
           fixed2(px) + "\" y2=\"" + fixed2(top + plot_h + 6.0) +
           "\" stroke=\"#1a1a1a\" stroke-width=\"1\"/>\n";
    svg += "  <text x=\"" + fixed2(px) + "\" y=\"" + fixed2(top + plot_h + 22.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" +
           short_label(frac) + "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double value = 0.25 * t;
    const double py = y_of(value);
    svg += "  <line x1=\"" + fixed2(left - 6.0) + "\" y1=\"" + fixed2(py) + "\" x2=\"" +
           fixed2(left) + "\" y2=\"" + fixed2(py) + "\" stroke=\"#1a1a1a\" stroke-width=\"1\"/>\n";
    svg += "  <text x=\"" + fixed2(left - 10.0) + "\" y=\"" + fixed2(py + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\">" +
           short_label(value) + "</text>\n";
  }
  svg += "  <text x=\"" + fixed2(left + plot_w / 2.0) + "\" y=\"" + fixed2(height - 18.0) +
         "\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">\xCE\xB8/\xCF\x80"
         "</text>\n";
  svg += "  <text x=\"18\" y=\"" + fixed2(top + plot_h / 2.0) +
         "\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 " +
         fixed2(top + plot_h / 2.0) + ")\">dimensionless value</text>\n";

  // The three series: D solid, V dotted, D^2+V^2 dashed.
  svg += polyline([](const coplanar::SweepRow& r) { return r.distinguishability; }, nullptr, "D");
  svg += polyline([](const coplanar::SweepRow& r) { return r.visibility; }, "1.5,3.5", "V");
  svg += polyline([](const coplanar::SweepRow& r) { return r.sum_sq; }, "7,4", "D2V2");

  // Legend.
  const double lx = left + plot_w - 150.0;
  const double ly = top + 16.0;
  const char* names[3] = {"D", "V", "D\xC2\xB2+V\xC2\xB2"};
  const char* dashes[3] = {nullptr, "1.5,3.5", "7,4"};
  for (int s = 0; s < 3; ++s) {
    const double yy = ly + 20.0 * s;
    svg += "  <line x1=\"" + fixed2(lx) + "\" y1=\"" + fixed2(yy) + "\" x2=\"" +
           fixed2(lx + 36.0) + "\" y2=\"" + fixed2(yy) +
           "\" stroke=\"#1a1a1a\" stroke-width=\"1.6\"";
    if (dashes[s] != nullptr) {
      svg += " stroke-dasharray=\"";
      svg += dashes[s];
      svg += "\"";
    }
    svg += "/>\n";
    svg += "  <text x=\"" + fixed2(lx + 44.0) + "\" y=\"" + fixed2(yy + 4.5) +
           "\" font-family=\"sans-serif\" font-size=\"13\">" + names[s] + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string digest_string(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string render_manifest_json(const RunManifest& m) {
  ordered_json doc;
  doc["tool"] = m.tool;
  doc["version"] = m.tool_version.empty() ? std::string(duality::version) : m.tool_version;
  doc["command_line"] = m.command_line;
  doc["config_digest"] = m.config_digest;
  doc["seed"] = m.seed;
  doc["timestamp_utc"] = m.timestamp_utc;
  ordered_json outputs = ordered_json::array();
  for (const OutputRecord& rec : m.outputs) {
    outputs.push_back({{"path", rec.path}, {"digest", rec.digest}});
  }
  doc["outputs"] = std::move(outputs);
  return doc.dump(2) + "\n";
}

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read '" + path.string() + "'");
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

}  // namespace duality::io
