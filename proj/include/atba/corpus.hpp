#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "atba/io.hpp"
#include "atba/parallel.hpp"
#include "atba/synthetic.hpp"

namespace atba {

// On-disk corpus layout:
//   <root>/manifest.json
//   <root>/probabilities/<id>.probs
//   <root>/transcripts/<id>.json
//   <root>/labels/<id>.json          (ground truth, kept apart from transcripts)
//   <root>/embeddings/<id>.embd

struct ManifestVideo {
  std::string id;
  int frames = 0;
  std::string probabilities;
  std::string transcript;
  std::string labels;
  std::string embeddings;
};

struct Manifest {
  GeneratorSpec spec;
  std::vector<ManifestVideo> videos;
};

inline void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["spec"] = generator_spec_to_json(manifest.spec);
  nlohmann::ordered_json videos = nlohmann::ordered_json::array();
  for (const ManifestVideo& v : manifest.videos) {
    nlohmann::ordered_json entry;
    entry["id"] = v.id;
    entry["frames"] = v.frames;
    entry["files"] = {{"probabilities", v.probabilities},
                      {"transcript", v.transcript},
                      {"labels", v.labels},
                      {"embeddings", v.embeddings}};
    videos.push_back(entry);
  }
  j["videos"] = videos;
  detail::dump_json(path, j);
}

inline Manifest read_manifest(const std::filesystem::path& path) {
  const auto j = detail::parse_json_file(path);
  detail::check_version(j, path);
  Manifest manifest;
  manifest.spec = generator_spec_from_json(detail::require_field(j, "spec", path), path);
  const auto& videos = detail::require_field(j, "videos", path);
  if (!videos.is_array())
    fail(ErrorKind::Format, path.string() + ": field 'videos' must be an array");
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const auto& entry = videos[i];
    ManifestVideo v;
    v.id = detail::require_string(entry, "id", path);
    v.frames = detail::require_field(entry, "frames", path).get<int>();
    const auto& files = detail::require_field(entry, "files", path);
    v.probabilities = detail::require_string(files, "probabilities", path);
    v.transcript = detail::require_string(files, "transcript", path);
    v.labels = detail::require_string(files, "labels", path);
    v.embeddings = detail::require_string(files, "embeddings", path);
    manifest.videos.push_back(std::move(v));
  }
  return manifest;
}

// Generates and writes the whole corpus. Per-video work fans out over the
// worker pool; each video writes only its own files, the manifest is written
// last from metadata collected in index order, so the result is byte-
// identical for a given spec regardless of thread count.
inline Manifest generate_corpus(const GeneratorSpec& spec, const std::filesystem::path& root,
                                int threads = 1) {
  spec.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  for (const char* sub : {"probabilities", "transcripts", "labels", "embeddings"}) {
    fs::create_directories(root / sub, ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + (root / sub).string() + ": " + ec.message());
  }

  Manifest manifest;
  manifest.spec = spec;
  manifest.videos.resize(static_cast<std::size_t>(spec.videos));

  parallel_for(spec.videos, threads, [&](int index) {
    const VideoSample sample = generate_video(spec, index);
    ManifestVideo& row = manifest.videos[static_cast<std::size_t>(index)];
    row.id = sample.id;
    row.frames = sample.probabilities.frames();
    row.probabilities = "probabilities/" + sample.id + ".probs";
    row.transcript = "transcripts/" + sample.id + ".json";
    row.labels = "labels/" + sample.id + ".json";
    row.embeddings = "embeddings/" + sample.id + ".embd";
    write_probability_file(root / row.probabilities, sample.probabilities);
    write_transcript_file(root / row.transcript, sample.id, sample.transcript);
    write_labels_file(root / row.labels, sample.id, sample.ground_truth);
    write_embedding_file(root / row.embeddings, sample.embeddings);
  });

  write_manifest(root / "manifest.json", manifest);
  return manifest;
}

}  // namespace atba
