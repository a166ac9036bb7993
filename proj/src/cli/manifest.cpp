#include "glucolab/cli/manifest.hpp"

#include <algorithm>

#include "glucolab/util/errors.hpp"
#include "glucolab/util/hashing.hpp"
#include "glucolab/util/keyvalue.hpp"

namespace glucolab::cli {

namespace {

constexpr int kManifestVersion = 1;

std::filesystem::path resolve(const std::filesystem::path& run_dir, const std::string& path) {
  std::filesystem::path p(path);
  return p.is_absolute() ? p : run_dir / p;
}

void write_list(KeyValueDoc& doc, const std::string& section, const std::vector<FileDigest>& files) {
  doc.set(section + ".count", files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    doc.set(section + ".file_" + std::to_string(i), files[i].path);
    doc.set(section + ".sha256_" + std::to_string(i), files[i].sha256);
  }
}

std::vector<FileDigest> read_list(const KeyValueDoc& doc, const std::string& section) {
  std::vector<FileDigest> files;
  const auto n = doc.get_int(section + ".count", 0);
  for (long long i = 0; i < n; ++i) {
    files.push_back({doc.get_string(section + ".file_" + std::to_string(i)),
                     doc.get_string(section + ".sha256_" + std::to_string(i))});
  }
  return files;
}

}  // namespace

const FileDigest* Manifest::find_output(const std::string& path) const {
  auto it = std::find_if(outputs.begin(), outputs.end(),
                         [&](const FileDigest& f) { return f.path == path; });
  return it == outputs.end() ? nullptr : &*it;
}

std::string manifest_to_string(const Manifest& manifest) {
  KeyValueDoc doc;
  doc.set("format_version", kManifestVersion);
  doc.set("kind", "manifest");
  doc.set("command", manifest.command);
  doc.set("config_sha256", manifest.config_sha256);
  write_list(doc, "inputs", manifest.inputs);
  write_list(doc, "outputs", manifest.outputs);
  return doc.to_string();
}

Manifest parse_manifest(const std::string& text, const std::string& origin) {
  const auto doc = KeyValueDoc::parse(text, origin);
  if (doc.get_int("format_version", 0) != kManifestVersion || doc.get_string("kind", "") != "manifest") {
    throw FormatError(origin + ": not a version " + std::to_string(kManifestVersion) + " manifest");
  }
  Manifest m;
  m.command = doc.get_string("command");
  m.config_sha256 = doc.get_string("config_sha256");
  m.inputs = read_list(doc, "inputs");
  m.outputs = read_list(doc, "outputs");
  return m;
}

std::filesystem::path manifest_path(const std::filesystem::path& run_dir, const std::string& command) {
  return run_dir / "manifests" / (command + ".ini");
}

void save_manifest(const std::filesystem::path& run_dir, const Manifest& manifest) {
  std::filesystem::create_directories(run_dir / "manifests");
  write_file_atomic(manifest_path(run_dir, manifest.command), manifest_to_string(manifest));
}

Manifest load_manifest(const std::filesystem::path& run_dir, const std::string& command) {
  const auto path = manifest_path(run_dir, command);
  if (!std::filesystem::exists(path)) {
    throw MissingArtifactError("no manifest for '" + command + "' in '" + run_dir.string() +
                               "'; run `glucolab " + command + "` first");
  }
  return parse_manifest(read_file(path), path.string());
}

FileDigest digest(const std::filesystem::path& run_dir, const std::string& path) {
  return {path, sha256_file(resolve(run_dir, path))};
}

std::vector<VerifyIssue> verify_run(const std::filesystem::path& run_dir, std::size_t* files_checked) {
  const auto dir = run_dir / "manifests";
  if (!std::filesystem::is_directory(dir)) {
    throw MissingArtifactError("no manifests in '" + run_dir.string() + "'");
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".ini") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<VerifyIssue> issues;
  std::size_t checked = 0;
  for (const auto& path : paths) {
    const Manifest m = parse_manifest(read_file(path), path.string());
    for (const auto* list : {&m.inputs, &m.outputs}) {
      for (const auto& f : *list) {
        ++checked;
        const auto file = resolve(run_dir, f.path);
        if (!std::filesystem::exists(file)) {
          issues.push_back({m.command, f.path, "missing"});
        } else if (sha256_file(file) != f.sha256) {
          issues.push_back({m.command, f.path, "hash mismatch"});
        }
      }
    }
  }
  if (files_checked) *files_checked = checked;
  return issues;
}

}  // namespace glucolab::cli
