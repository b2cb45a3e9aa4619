#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "atba/error.hpp"
#include "atba/losses.hpp"
#include "atba/synthetic.hpp"
#include "atba/types.hpp"

namespace atba {

// File formats. Frames are 1-based and class indices 1-based in every
// document; all writes are byte-deterministic functions of their inputs (no
// timestamps inside data files).
//
// Probability matrices use a binary container: 8-byte magic "ATBAPSEQ",
// little-endian unsigned 32-bit frame and class counts, then T*C little-endian
// IEEE-754 doubles in row-major order. A text alternative (one frame per
// line, space-separated decimals) is accepted on read for files with a .txt
// extension. Annotations are JSON documents carrying a format_version field.

inline constexpr int kFormatVersion = 1;
inline constexpr char kProbabilityMagic[9] = "ATBAPSEQ";
inline constexpr char kEmbeddingMagic[9] = "ATBAEMB1";

namespace detail {

inline void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void append_f64(std::string& out, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

inline std::uint32_t read_u32(const std::string& data, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[offset + static_cast<std::size_t>(i)]))
         << (8 * i);
  return v;
}

inline double read_f64(const std::string& data, std::size_t offset) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[offset + static_cast<std::size_t>(i)]))
         << (8 * i);
  return std::bit_cast<double>(v);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  return std::move(buffer).str();
}

inline void write_file(const std::filesystem::path& path, const std::string& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

inline void check_header(const std::string& data, const char* magic,
                         const std::filesystem::path& path) {
  if (data.size() < 16)
    fail(ErrorKind::Format, path.string() + ": truncated header, expected at least 16 bytes, got " +
                                std::to_string(data.size()));
  if (data.compare(0, 8, magic, 8) != 0)
    fail(ErrorKind::Format, path.string() + ": bad magic at offset 0");
}

inline Matrix parse_text_matrix(const std::string& text, const std::filesystem::path& path) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  int line_number = 0;
  while (std::getline(lines, line)) {
    ++line_number;
    std::istringstream fields(line);
    std::vector<double> row;
    std::string token;
    while (fields >> token) {
      std::size_t consumed = 0;
      double value = 0.0;
      try {
        value = std::stod(token, &consumed);
      } catch (const std::exception&) {
        consumed = 0;
      }
      if (consumed != token.size())
        fail(ErrorKind::Format,
             path.string() + ": line " + std::to_string(line_number) + ": bad number '" + token + "'");
      row.push_back(value);
    }
    if (row.empty()) continue;  // blank line
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorKind::Format, path.string() + ": line " + std::to_string(line_number) +
                                  ": expected " + std::to_string(rows.front().size()) + " columns, got " +
                                  std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::Format, path.string() + ": no rows");
  return Matrix::from_rows(rows);
}

inline nlohmann::ordered_json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::ordered_json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::Format, path.string() + ": " + e.what());
  }
}

inline void check_version(const nlohmann::ordered_json& j, const std::filesystem::path& path) {
  if (!j.contains("format_version") || !j["format_version"].is_number_integer())
    fail(ErrorKind::Format, path.string() + ": missing integer field 'format_version'");
  const int version = j["format_version"].get<int>();
  if (version != kFormatVersion)
    fail(ErrorKind::Format,
         path.string() + ": unsupported format_version " + std::to_string(version) +
             " (this build reads version " + std::to_string(kFormatVersion) + ")");
}

inline const nlohmann::ordered_json& require_field(const nlohmann::ordered_json& j,
                                                   const char* field,
                                                   const std::filesystem::path& path) {
  if (!j.contains(field))
    fail(ErrorKind::Format, path.string() + ": missing field '" + field + "'");
  return j[field];
}

inline std::vector<int> require_int_array(const nlohmann::ordered_json& j, const char* field,
                                          const std::filesystem::path& path) {
  const auto& value = require_field(j, field, path);
  if (!value.is_array())
    fail(ErrorKind::Format, path.string() + ": field '" + field + "' must be an array");
  std::vector<int> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number_integer())
      fail(ErrorKind::Format, path.string() + ": field '" + field + "[" + std::to_string(i) +
                                  "]' must be an integer");
    out.push_back(value[i].get<int>());
  }
  return out;
}

inline std::string require_string(const nlohmann::ordered_json& j, const char* field,
                                  const std::filesystem::path& path) {
  const auto& value = require_field(j, field, path);
  if (!value.is_string())
    fail(ErrorKind::Format, path.string() + ": field '" + field + "' must be a string");
  return value.get<std::string>();
}

inline void dump_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  write_file(path, j.dump(2) + "\n");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Probability matrices

inline void write_probability_file(const std::filesystem::path& path,
                                   const ProbabilitySequence& sequence) {
  std::string payload;
  payload.reserve(16 + sequence.matrix().size() * 8);
  payload.append(kProbabilityMagic, 8);
  detail::append_u32(payload, static_cast<std::uint32_t>(sequence.frames()));
  detail::append_u32(payload, static_cast<std::uint32_t>(sequence.classes()));
  for (double v : sequence.matrix().values()) detail::append_f64(payload, v);
  detail::write_file(path, payload);
}

inline ProbabilitySequence read_probability_file(const std::filesystem::path& path) {
  if (path.extension() == ".txt")
    return ProbabilitySequence(detail::parse_text_matrix(detail::read_file(path), path));

  const std::string data = detail::read_file(path);
  detail::check_header(data, kProbabilityMagic, path);
  const std::uint64_t frames = detail::read_u32(data, 8);
  const std::uint64_t classes = detail::read_u32(data, 12);
  if (frames > 50'000'000ull || classes > 1'000'000ull || frames * classes > 500'000'000ull)
    fail(ErrorKind::Format, path.string() + ": dimension overflow (" + std::to_string(frames) +
                                " x " + std::to_string(classes) + ")");
  const std::size_t expected = 16 + static_cast<std::size_t>(frames * classes) * 8;
  if (data.size() != expected)
    fail(ErrorKind::Format, path.string() + ": expected " + std::to_string(expected) +
                                " bytes, got " + std::to_string(data.size()));

  Matrix values(static_cast<int>(frames), static_cast<int>(classes));
  std::size_t offset = 16;
  for (double& v : values.values()) {
    v = detail::read_f64(data, offset);
    offset += 8;
  }
  return ProbabilitySequence(std::move(values));
}

// ---------------------------------------------------------------------------
// Embeddings

inline void write_embedding_file(const std::filesystem::path& path, const EmbeddingSet& embeddings) {
  std::string payload;
  payload.append(kEmbeddingMagic, 8);
  detail::append_u32(payload, static_cast<std::uint32_t>(embeddings.frames.rows()));
  detail::append_u32(payload, static_cast<std::uint32_t>(embeddings.frames.cols()));
  detail::append_u32(payload, static_cast<std::uint32_t>(embeddings.prototypes.rows()));
  for (double v : embeddings.frames.values()) detail::append_f64(payload, v);
  for (double v : embeddings.prototypes.values()) detail::append_f64(payload, v);
  for (double v : embeddings.occurrence_logits) detail::append_f64(payload, v);
  detail::write_file(path, payload);
}

inline EmbeddingSet read_embedding_file(const std::filesystem::path& path) {
  const std::string data = detail::read_file(path);
  detail::check_header(data, kEmbeddingMagic, path);
  if (data.size() < 20)
    fail(ErrorKind::Format, path.string() + ": truncated header, expected at least 20 bytes");
  const std::uint64_t frames = detail::read_u32(data, 8);
  const std::uint64_t dim = detail::read_u32(data, 12);
  const std::uint64_t classes = detail::read_u32(data, 16);
  if (frames * dim + classes * dim + classes > 500'000'000ull)
    fail(ErrorKind::Format, path.string() + ": dimension overflow");
  const std::size_t expected = 20 + static_cast<std::size_t>((frames + classes) * dim + classes) * 8;
  if (data.size() != expected)
    fail(ErrorKind::Format, path.string() + ": expected " + std::to_string(expected) +
                                " bytes, got " + std::to_string(data.size()));

  EmbeddingSet out;
  out.frames = Matrix(static_cast<int>(frames), static_cast<int>(dim));
  out.prototypes = Matrix(static_cast<int>(classes), static_cast<int>(dim));
  out.occurrence_logits.resize(static_cast<std::size_t>(classes));
  std::size_t offset = 20;
  for (double& v : out.frames.values()) { v = detail::read_f64(data, offset); offset += 8; }
  for (double& v : out.prototypes.values()) { v = detail::read_f64(data, offset); offset += 8; }
  for (double& v : out.occurrence_logits) { v = detail::read_f64(data, offset); offset += 8; }
  return out;
}

// ---------------------------------------------------------------------------
// Annotations

inline void write_transcript_file(const std::filesystem::path& path, const std::string& video_id,
                                  const Transcript& transcript) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["video_id"] = video_id;
  j["actions"] = transcript.actions();
  detail::dump_json(path, j);
}

inline std::pair<std::string, Transcript> read_transcript_file(const std::filesystem::path& path) {
  const auto j = detail::parse_json_file(path);
  detail::check_version(j, path);
  const std::string id = detail::require_string(j, "video_id", path);
  return {id, Transcript(detail::require_int_array(j, "actions", path))};
}

inline void write_labels_file(const std::filesystem::path& path, const std::string& video_id,
                              const PseudoLabels& labels) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["video_id"] = video_id;
  j["labels"] = labels.values();
  detail::dump_json(path, j);
}

inline std::pair<std::string, PseudoLabels> read_labels_file(const std::filesystem::path& path) {
  const auto j = detail::parse_json_file(path);
  detail::check_version(j, path);
  const std::string id = detail::require_string(j, "video_id", path);
  return {id, PseudoLabels(detail::require_int_array(j, "labels", path))};
}

// Class vocabulary: maps class indices to display names.
inline void write_vocabulary_file(const std::filesystem::path& path,
                                  const std::map<int, std::string>& names) {
  nlohmann::ordered_json classes = nlohmann::ordered_json::object();
  for (const auto& [index, name] : names) classes[std::to_string(index)] = name;
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["classes"] = classes;
  detail::dump_json(path, j);
}

inline std::map<int, std::string> read_vocabulary_file(const std::filesystem::path& path) {
  const auto j = detail::parse_json_file(path);
  detail::check_version(j, path);
  const auto& classes = detail::require_field(j, "classes", path);
  if (!classes.is_object())
    fail(ErrorKind::Format, path.string() + ": field 'classes' must be an object");
  std::map<int, std::string> out;
  for (const auto& [key, value] : classes.items()) {
    int index = 0;
    try {
      index = std::stoi(key);
    } catch (const std::exception&) {
      fail(ErrorKind::Format, path.string() + ": class key '" + key + "' is not an integer");
    }
    if (!value.is_string())
      fail(ErrorKind::Format, path.string() + ": classes['" + key + "'] must be a string");
    out[index] = value.get<std::string>();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config files

inline void write_config_file(const std::filesystem::path& path, const Config& config) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["boundary_window"] = config.boundary_window;
  j["transition_window"] = config.transition_window;
  j["candidate_multiplier"] = config.candidate_multiplier;
  j["suppression_fraction"] = config.suppression_fraction;
  j["temperature"] = config.temperature;
  j["occurrence_weight"] = config.occurrence_weight;
  j["classification_weight"] = config.classification_weight;
  j["contrastive_weight"] = config.contrastive_weight;
  j["background_class"] = config.background_class;
  j["background_sample_weight"] = config.background_sample_weight;
  detail::dump_json(path, j);
}

inline Config read_config_file(const std::filesystem::path& path) {
  const auto j = detail::parse_json_file(path);
  detail::check_version(j, path);
  Config config;
  auto load_int = [&](const char* field, int& target) {
    if (!j.contains(field)) return;
    if (!j[field].is_number_integer())
      fail(ErrorKind::Format, path.string() + ": field '" + field + "' must be an integer");
    target = j[field].get<int>();
  };
  auto load_double = [&](const char* field, double& target) {
    if (!j.contains(field)) return;
    if (!j[field].is_number())
      fail(ErrorKind::Format, path.string() + ": field '" + field + "' must be a number");
    target = j[field].get<double>();
  };
  load_int("boundary_window", config.boundary_window);
  load_int("transition_window", config.transition_window);
  load_int("candidate_multiplier", config.candidate_multiplier);
  load_double("suppression_fraction", config.suppression_fraction);
  load_double("temperature", config.temperature);
  load_double("occurrence_weight", config.occurrence_weight);
  load_double("classification_weight", config.classification_weight);
  load_double("contrastive_weight", config.contrastive_weight);
  load_int("background_class", config.background_class);
  load_double("background_sample_weight", config.background_sample_weight);
  config.validate();
  return config;
}

// ---------------------------------------------------------------------------
// Generator specs

inline nlohmann::ordered_json generator_spec_to_json(const GeneratorSpec& spec) {
  nlohmann::ordered_json j;
  j["seed"] = spec.seed;
  j["videos"] = spec.videos;
  j["frames"] = {spec.min_frames, spec.max_frames};
  j["segments"] = {spec.min_segments, spec.max_segments};
  j["classes"] = spec.classes;
  j["background_class"] = spec.background_class;
  j["background_rate"] = spec.background_rate;
  j["confusion"] = spec.confusion;
  j["smoothing_radius"] = spec.smoothing_radius;
  j["distractor_rate"] = spec.distractor_rate;
  j["embedding_dim"] = spec.embedding_dim;
  j["embedding_noise"] = spec.embedding_noise;
  return j;
}

inline GeneratorSpec generator_spec_from_json(const nlohmann::ordered_json& j,
                                              const std::filesystem::path& path) {
  GeneratorSpec spec;
  auto load_range = [&](const char* field, int& lo, int& hi) {
    const std::vector<int> range = detail::require_int_array(j, field, path);
    if (range.size() != 2)
      fail(ErrorKind::Format, path.string() + ": field '" + field + "' must be [min, max]");
    lo = range[0];
    hi = range[1];
  };
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  spec.videos = detail::require_field(j, "videos", path).get<int>();
  load_range("frames", spec.min_frames, spec.max_frames);
  load_range("segments", spec.min_segments, spec.max_segments);
  if (j.contains("classes")) spec.classes = j["classes"].get<int>();
  if (j.contains("background_class")) spec.background_class = j["background_class"].get<int>();
  if (j.contains("background_rate")) spec.background_rate = j["background_rate"].get<double>();
  if (j.contains("confusion")) spec.confusion = j["confusion"].get<double>();
  if (j.contains("smoothing_radius")) spec.smoothing_radius = j["smoothing_radius"].get<int>();
  if (j.contains("distractor_rate")) spec.distractor_rate = j["distractor_rate"].get<double>();
  if (j.contains("embedding_dim")) spec.embedding_dim = j["embedding_dim"].get<int>();
  if (j.contains("embedding_noise")) spec.embedding_noise = j["embedding_noise"].get<double>();
  spec.validate();
  return spec;
}

inline void write_generator_spec_file(const std::filesystem::path& path, const GeneratorSpec& spec) {
  nlohmann::ordered_json j = generator_spec_to_json(spec);
  nlohmann::ordered_json out;
  out["format_version"] = kFormatVersion;
  for (auto& [key, value] : j.items()) out[key] = value;
  detail::dump_json(path, out);
}

inline GeneratorSpec read_generator_spec_file(const std::filesystem::path& path) {
  const auto j = detail::parse_json_file(path);
  detail::check_version(j, path);
  return generator_spec_from_json(j, path);
}

}  // namespace atba
