#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "duality/coplanar.hpp"
#include "duality/io.hpp"
#include "duality/measures.hpp"
#include "duality/qcore.hpp"

using namespace duality;

namespace {
constexpr double pi = std::numbers::pi;

/// Checks that every opened XML tag is closed in order. Good enough for the
/// renderer's own output; not a general XML parser.
bool xml_tags_balanced(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    const std::size_t end = text.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = text.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag.front() == '?') continue;  // declaration
    if (tag.front() == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    if (tag.back() == '/') continue;  // self-closing
    stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
  }
  return stack.empty();
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}
}  // namespace

TEST_CASE("angle expressions") {
  CHECK(io::parse_angle("pi") == pi);
  CHECK(std::abs(io::parse_angle("2pi/3") - 2.0 * pi / 3.0) <= 1e-15);
  CHECK(std::abs(io::parse_angle("0.5pi") - 0.5 * pi) <= 1e-15);
  CHECK(std::abs(io::parse_angle("pi/4") - pi / 4.0) <= 1e-15);
  CHECK(io::parse_angle("-pi") == -pi);
  CHECK(io::parse_angle("1.75") == 1.75);
  CHECK(io::parse_angle("0") == 0.0);
  CHECK(io::parse_angle(" 2pi / 3 ") == io::parse_angle("2pi/3"));

  CHECK_THROWS_AS(io::parse_angle(""), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_angle("twopi"), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_angle("pi/0"), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_angle("pi/"), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_angle("pix"), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_angle("1.2.3"), std::invalid_argument);
}

TEST_CASE("value formatting round-trips bitwise") {
  for (double v : {0.0, 1.0, -1.0, pi, 1.0 / 3.0, 0.1, 2.0 / 3.0, 1e-300, -6.02e23,
                   0.49999999999999994}) {
    CHECK(io::parse_value(io::format_value(v)) == v);
  }
  CHECK_THROWS_AS(io::parse_value("1.0x"), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_value(""), std::invalid_argument);
}

TEST_CASE("configuration parsing accepts both detector forms") {
  SUBCASE("bloch form") {
    const io::ParsedConfig parsed = io::parse_config_text(R"({
      "n_beams": 2,
      "populations": [0.25, 0.75],
      "detector": {"bloch_vectors": [[0, 0, 1], [1, 0, 0]]}
    })");
    CHECK(parsed.config.beam_count() == 2);
    CHECK(parsed.config.detector_dim() == 2);
    CHECK(parsed.config.populations()[1] == 0.75);
    CHECK(std::abs(overlap_sq(parsed.config.detector_states()[0],
                              parsed.config.detector_states()[1]) -
                   0.5) <= 1e-12);
    CHECK(!parsed.measurement.has_value());
  }
  SUBCASE("amplitude form with a higher-dimensional detector") {
    const io::ParsedConfig parsed = io::parse_config_text(R"({
      "n_beams": 2,
      "populations": [0.5, 0.5],
      "detector": {"amplitudes": [
        [[1, 0], [0, 0], [0, 0]],
        [[0, 0], [0.6, 0], [0, 0.8]]
      ]}
    })");
    CHECK(parsed.config.detector_dim() == 3);
    CHECK(overlap_sq(parsed.config.detector_states()[0], parsed.config.detector_states()[1]) <=
          1e-15);
  }
  SUBCASE("measurement given as angles") {
    const io::ParsedConfig parsed = io::parse_config_text(R"({
      "n_beams": 2,
      "populations": [0.5, 0.5],
      "detector": {"bloch_vectors": [[0, 0, 1], [0, 0, -1]]},
      "measurement": {"beta": 0.0, "gamma": 0.0}
    })");
    REQUIRE(parsed.measurement.has_value());
    CHECK(parsed.measurement->outcome_count() == 2);
    const KnowledgeReport rep = which_way_knowledge(parsed.config, *parsed.measurement);
    CHECK(std::abs(rep.total - 1.0) <= 1e-12);
  }
  SUBCASE("measurement given as explicit projectors") {
    const io::ParsedConfig parsed = io::parse_config_text(R"({
      "n_beams": 2,
      "populations": [0.5, 0.5],
      "detector": {"bloch_vectors": [[0, 0, 1], [0, 0, -1]]},
      "measurement": {"projectors": [
        [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
        [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]
      ]}
    })");
    REQUIRE(parsed.measurement.has_value());
    CHECK(std::abs(which_way_knowledge(parsed.config, *parsed.measurement).total - 1.0) <=
          1e-12);
  }
}

TEST_CASE("configuration parsing reports helpful errors") {
  const auto message_of = [](const std::string& text) {
    try {
      io::parse_config_text(text);
    } catch (const io::ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("(no error)");
  };

  SUBCASE("malformed json mentions the parse location") {
    const std::string msg = message_of("{ \"n_beams\": 3,, }");
    CHECK(msg.find("parse error") != std::string::npos);
    CHECK(msg.find("line 1") != std::string::npos);
  }
  SUBCASE("population count mismatch names the field and line") {
    const std::string msg = message_of(
        "{\n"
        "  \"n_beams\": 3,\n"
        "  \"populations\": [0.5, 0.5],\n"
        "  \"detector\": {\"bloch_vectors\": [[0,0,1],[0,0,1],[0,0,1]]}\n"
        "}");
    CHECK(msg.find("populations") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }
  SUBCASE("off-simplex populations are rejected") {
    const std::string msg = message_of(R"({
      "n_beams": 2,
      "populations": [0.5, 0.4],
      "detector": {"bloch_vectors": [[0,0,1],[0,0,1]]}
    })");
    CHECK(msg.find("populations") != std::string::npos);
  }
  SUBCASE("detector needs exactly one representation") {
    const std::string both = message_of(R"({
      "n_beams": 1,
      "populations": [1.0],
      "detector": {"bloch_vectors": [[0,0,1]], "amplitudes": [[[1,0],[0,0]]]}
    })");
    CHECK(both.find("detector") != std::string::npos);
    const std::string neither = message_of(R"({
      "n_beams": 1,
      "populations": [1.0],
      "detector": {}
    })");
    CHECK(neither.find("detector") != std::string::npos);
  }
  SUBCASE("non-unit bloch vector is rejected with the field name") {
    const std::string msg = message_of(R"({
      "n_beams": 1,
      "populations": [1.0],
      "detector": {"bloch_vectors": [[0, 0, 2]]}
    })");
    CHECK(msg.find("bloch_vectors") != std::string::npos);
  }
  SUBCASE("angle measurement requires a qubit detector") {
    const std::string msg = message_of(R"({
      "n_beams": 1,
      "populations": [1.0],
      "detector": {"amplitudes": [[[1,0],[0,0],[0,0]]]},
      "measurement": {"beta": 0, "gamma": 0}
    })");
    CHECK(msg.find("measurement") != std::string::npos);
  }
  SUBCASE("missing n_beams") {
    CHECK(message_of("{}").find("n_beams") != std::string::npos);
  }
  SUBCASE("non-object document") {
    CHECK(message_of("[1, 2, 3]").find("object") != std::string::npos);
  }
}

TEST_CASE("config serialization round-trips") {
  const BeamDetectorConfig cfg = coplanar::make_config(1.234);
  const io::ParsedConfig back = io::parse_config_text(io::config_to_json(cfg));
  REQUIRE(back.config.beam_count() == cfg.beam_count());
  for (std::size_t i = 0; i < cfg.beam_count(); ++i) {
    CHECK(back.config.populations()[i] == cfg.populations()[i]);
    CHECK(std::abs(overlap_sq(back.config.detector_states()[i], cfg.detector_states()[i]) -
                   1.0) <= 1e-15);
  }
}

TEST_CASE("sweep csv renders and parses losslessly") {
  const std::vector<coplanar::SweepRow> rows = coplanar::sweep(0.0, pi, 16);
  const std::string csv = io::render_sweep_csv(rows);
  CHECK(csv.rfind("theta,V,D,D2V2,branch,beta_opt,gamma_opt\n", 0) == 0);
  CHECK(csv.find("\r") == std::string::npos);

  const std::vector<coplanar::SweepRow> back = io::parse_sweep_csv(csv);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].theta == rows[i].theta);
    CHECK(back[i].visibility == rows[i].visibility);
    CHECK(back[i].distinguishability == rows[i].distinguishability);
    CHECK(back[i].sum_sq == rows[i].sum_sq);
    CHECK(back[i].branch == rows[i].branch);
    CHECK(back[i].beta_opt == rows[i].beta_opt);
    CHECK(back[i].gamma_opt == rows[i].gamma_opt);
    const double recomputed = back[i].visibility * back[i].visibility +
                              back[i].distinguishability * back[i].distinguishability;
    CHECK(std::abs(recomputed - back[i].sum_sq) <= 1e-15);
  }

  CHECK_THROWS_AS(io::parse_sweep_csv("wrong,header\n"), io::ConfigError);
  CHECK_THROWS_AS(io::parse_sweep_csv(csv + "1,2,3\n"), io::ConfigError);
}

TEST_CASE("sweep svg contains exactly three data series") {
  const std::vector<coplanar::SweepRow> rows = coplanar::sweep(0.0, pi, 33);
  const std::string svg = io::render_sweep_svg(rows);

  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count_occurrences(svg, "<polyline") == 3);
  CHECK(count_occurrences(svg, "<path") == 0);
  CHECK(svg.find("stroke-dasharray=\"1.5,3.5\"") != std::string::npos);
  CHECK(svg.find("stroke-dasharray=\"7,4\"") != std::string::npos);
  CHECK(svg.find("dimensionless value") != std::string::npos);
  CHECK(xml_tags_balanced(svg));

  CHECK_THROWS_AS(io::render_sweep_svg({rows[0]}), std::invalid_argument);
}

TEST_CASE("fnv1a64 reference vectors") {
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(io::fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(io::digest_string("") == "fnv1a64:cbf29ce484222325");
}

TEST_CASE("manifest rendering") {
  io::RunManifest m;
  m.tool_version = "9.9.9";
  m.command_line = {"duality", "sweep", "--csv", "out.csv"};
  m.config_digest = io::digest_string("input");
  m.seed = 7;
  m.timestamp_utc = "2026-01-01T00:00:00Z";
  m.outputs.push_back({"out.csv", io::digest_string("csv-bytes")});

  const std::string text = io::render_manifest_json(m);
  CHECK(text.back() == '\n');
  const nlohmann::json doc = nlohmann::json::parse(text);
  CHECK(doc["tool"] == "duality");
  CHECK(doc["version"] == "9.9.9");
  CHECK(doc["command_line"].size() == 4);
  CHECK(doc["command_line"][1] == "sweep");
  CHECK(doc["seed"] == 7);
  CHECK(doc["timestamp_utc"] == "2026-01-01T00:00:00Z");
  REQUIRE(doc["outputs"].size() == 1);
  CHECK(doc["outputs"][0]["path"] == "out.csv");
  CHECK(doc["outputs"][0]["digest"] == io::digest_string("csv-bytes"));
}

TEST_CASE("text file io") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "duality-io-test";
  std::filesystem::create_directories(dir);
  const std::filesystem::path file = dir / "roundtrip.txt";

  const std::string payload = "line one\nline two\n\xCE\xB8 bytes\n";
  io::write_text_file(file, payload);
  CHECK(io::read_text_file(file) == payload);

  CHECK_THROWS_AS(io::read_text_file(dir / "does-not-exist.txt"), io::IoError);
  CHECK_THROWS_AS(io::write_text_file(dir / "no-such-subdir" / "x.txt", "y"), io::IoError);
  std::filesystem::remove_all(dir);
}
