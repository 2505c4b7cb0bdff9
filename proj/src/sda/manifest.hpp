// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Corpus manifests: UTF-8 text, one entry per line,
// `<utt_id>\t<melf_path>` with an optional third column pointing at the
// paired clean reference (toy eval only). Lines starting with '#' are
// comments. Paths are resolved relative to the manifest's directory.

#ifndef SDA_MANIFEST_HPP_
#define SDA_MANIFEST_HPP_

#include <string>
#include <vector>

#include "sda/common.hpp"

namespace sda {

struct ManifestEntry {
  std::string utt_id;
  std::string melf_path;
  std::string paired_clean_path;  // empty unless an eval-pair manifest
};

struct CorpusManifest {
  std::string domain;  // "A" or "B" label, informational
  std::vector<ManifestEntry> entries;
  bool has_pairs = false;
};

// Parses and validates a manifest. Every referenced MELF header is opened;
// n_mels must equal expected_mels (pass 0 to skip that check).
CorpusManifest load_manifest(const std::string& path, int64_t expected_mels);

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries);

}  // namespace sda

#endif  // SDA_MANIFEST_HPP_
