// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#include "sda/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "sda/melf.hpp"

namespace fs = std::filesystem;

namespace sda {

CorpusManifest load_manifest(const std::string& path, int64_t expected_mels) {
  std::ifstream f(path);
  if (!f) throw MissingFile("cannot open manifest " + path);
  const fs::path base = fs::path(path).parent_path();

  CorpusManifest man;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ManifestEntry e;
    if (!std::getline(ls, e.utt_id, '\t') || !std::getline(ls, e.melf_path, '\t') ||
        e.utt_id.empty() || e.melf_path.empty())
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected <utt_id>\\t<melf_path>");
    std::getline(ls, e.paired_clean_path, '\t');
    if (!seen.insert(e.utt_id).second)
      throw ParseError(path + ":" + std::to_string(lineno) + ": duplicate utterance id " + e.utt_id);

    auto resolve = [&](const std::string& p) {
      fs::path fp(p);
      return fp.is_absolute() ? fp.string() : (base / fp).string();
    };
    e.melf_path = resolve(e.melf_path);
    if (!e.paired_clean_path.empty()) e.paired_clean_path = resolve(e.paired_clean_path);

    for (const std::string& fp : {e.melf_path, e.paired_clean_path}) {
      if (fp.empty()) continue;
      if (!fs::exists(fp))
        throw MissingFile(path + ":" + std::to_string(lineno) + ": missing file " + fp);
      const MelfHeader h = read_melf_header(fp);
      if (expected_mels > 0 && h.n_mels != expected_mels)
        throw HeaderMismatch(path + ":" + std::to_string(lineno) + ": " + fp + " has " +
                             std::to_string(h.n_mels) + " mel bins, expected " +
                             std::to_string(expected_mels));
    }
    man.has_pairs = man.has_pairs || !e.paired_clean_path.empty();
    man.entries.push_back(std::move(e));
  }
  if (man.entries.empty()) throw EmptyCorpus(path + ": empty corpus");
  return man;
}

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  for (const auto& e : entries) {
    f << e.utt_id << '\t' << e.melf_path;
    if (!e.paired_clean_path.empty()) f << '\t' << e.paired_clean_path;
    f << '\n';
  }
  if (!f) throw IoError("short write to " + path);
}

}  // namespace sda
