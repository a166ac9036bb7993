#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace glucolab::cli {

struct FileDigest {
  std::string path;  // relative to the run directory unless absolute
  std::string sha256;
};

/// Record of one command run: what went in, what came out.
struct Manifest {
  std::string command;
  std::string config_sha256;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;

  const FileDigest* find_output(const std::string& path) const;
};

std::string manifest_to_string(const Manifest& manifest);
Manifest parse_manifest(const std::string& text, const std::string& origin = "<string>");

std::filesystem::path manifest_path(const std::filesystem::path& run_dir, const std::string& command);
void save_manifest(const std::filesystem::path& run_dir, const Manifest& manifest);
Manifest load_manifest(const std::filesystem::path& run_dir, const std::string& command);

/// Digest of `path` resolved against `run_dir`.
FileDigest digest(const std::filesystem::path& run_dir, const std::string& path);

struct VerifyIssue {
  std::string manifest;
  std::string path;
  std::string problem;  // "missing" or "hash mismatch"
};

/// Re-hashes every input and output listed in every manifest of the run.
std::vector<VerifyIssue> verify_run(const std::filesystem::path& run_dir,
                                    std::size_t* files_checked = nullptr);

}  // namespace glucolab::cli
