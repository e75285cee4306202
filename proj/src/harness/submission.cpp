#include "bsim/harness/submission.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bsim::harness {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  if (!in) throw IngestError("cannot read " + f.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_source(const fs::path& p) { return p.extension() == ".src"; }

}  // namespace

Submission load_submission(const fs::path& path, const std::optional<std::string>& entry) {
  std::error_code ec;
  Submission s;
  s.entry = entry;
  if (fs::is_regular_file(path, ec)) {
    s.id = path.stem().string();
    s.units.push_back({path.filename().string(), read_file(path)});
    return s;
  }
  if (!fs::is_directory(path, ec)) throw IngestError("no such submission: " + path.string());
  s.id = path.filename().string();
  if (s.id.empty()) s.id = path.parent_path().filename().string();
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(path))
    if (e.is_regular_file() && is_source(e.path())) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IngestError(path.string() + " holds no .src files");
  for (const auto& f : files) s.units.push_back({f.filename().string(), read_file(f)});
  return s;
}

CorpusListing load_corpus(const fs::path& dir, const std::optional<std::string>& entry) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IngestError("not a directory: " + dir.string());
  std::vector<fs::path> items;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory() || (e.is_regular_file() && is_source(e.path()))) items.push_back(e.path());
  }
  std::sort(items.begin(), items.end());
  CorpusListing out;
  for (const auto& p : items) {
    try {
      out.submissions.push_back(load_submission(p, entry));
    } catch (const IngestError& e) {
      out.failures.push_back({p.filename().string(), e.what()});
    }
  }
  std::stable_sort(out.submissions.begin(), out.submissions.end(),
                   [](const Submission& a, const Submission& b) { return a.id < b.id; });
  // A.src next to a directory A: keep the first, list the other
  std::vector<Submission> unique;
  for (auto& s : out.submissions) {
    if (!unique.empty() && unique.back().id == s.id)
      out.failures.push_back({s.id, "duplicate submission id '" + s.id + "'"});
    else
      unique.push_back(std::move(s));
  }
  out.submissions = std::move(unique);
  return out;
}

std::string content_hash(const Submission& s) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&](const std::string& text) {
    for (unsigned char c : text) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    // length as separator so ("ab","c") and ("a","bc") differ
    for (std::size_t n = text.size(), k = 0; k < 8; ++k, n >>= 8) {
      h ^= n & 0xff;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& u : s.units) {
    feed(u.path);
    feed(u.text);
  }
  feed(s.entry.value_or(""));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bsim::harness
