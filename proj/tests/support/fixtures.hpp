#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <string>

#include <lasagne/kg.hpp>

namespace testsupport {

inline std::string fixture(const std::string& relative) {
  return std::string(LASAGNE_FIXTURE_DIR) + "/" + relative;
}

inline lasagne::KnowledgeGraph mini_kg() {
  return lasagne::KnowledgeGraph::load(fixture("mini/triples.tsv"), fixture("mini/labels.tsv"),
                                       fixture("mini/types.tsv"));
}

// Per-process unique scratch path; removed by the caller when it cares.
inline std::string scratch_path(const std::string& stem) {
  static std::atomic<unsigned> counter{0};
  char name[256];
  std::snprintf(name, sizeof(name), "%s-%ld-%u", stem.c_str(), long(::getpid()),
                counter.fetch_add(1));
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace testsupport
