#pragma once

// A submission is one program: a single source file or a directory of *.src
// units. Corpus directories hold one submission per subdirectory or file.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsim/frontend/parser.hpp"

namespace bsim::harness {

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Submission {
  std::string id;
  std::vector<frontend::SourceUnit> units;
  std::optional<std::string> entry;
};

// Reads only; parsing happens later. Throws IngestError when nothing is
// readable.
Submission load_submission(const std::filesystem::path& path, const std::optional<std::string>& entry = std::nullopt);

struct IngestFailure {
  std::string id;
  std::string message;
};

struct CorpusListing {
  std::vector<Submission> submissions;  // sorted by id
  std::vector<IngestFailure> failures;
};

CorpusListing load_corpus(const std::filesystem::path& dir, const std::optional<std::string>& entry = std::nullopt);

// Stable 64-bit hash over unit paths, texts and the entry, as 16 hex digits.
std::string content_hash(const Submission& s);

}  // namespace bsim::harness
