#pragma once

// The interaction library: abstracted episodes plus the vocabulary and
// generation settings that produced them.
//
// On disk it is line-delimited JSON. Line 1 is the header
//   {"type":"header","format":"tracequery-library","version":1,
//    "vocab":[...],"vocab_params":{...},"config":{...},"seeds":[...],"episodes":N}
// followed by one {"type":"episode",...,"checksum":"<fnv1a-64 hex>"} per line.
// The checksum covers the record's compact dump without the checksum key.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tracequery/abstraction/simulator.hpp"
#include "tracequery/error.hpp"
#include "tracequery/store/codec.hpp"

namespace tracequery::store {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kFormatName = "tracequery-library";

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

class TraceLibrary {
 public:
  TraceLibrary() : TraceLibrary(abs::SimConfig{}) {}
  explicit TraceLibrary(abs::SimConfig config)
      : config_(std::move(config)), vocab_(abs::default_vocab(config_.vocab_params())) {}

  // Rejects duplicate ids and letters outside the vocabulary.
  void add(abs::Episode ep) {
    if (index_.contains(ep.id)) throw ValidationError("id", "duplicate episode id '" + ep.id + "'");
    for (std::size_t i = 0; i < ep.steps.size(); ++i) {
      for (const auto& name : ep.steps[i].letter) {
        if (!vocab_.contains(name)) {
          throw ValidationError("steps[" + std::to_string(i) + "].letter",
                                "predicate '" + name + "' is not in the library vocabulary");
        }
      }
    }
    index_.emplace(ep.id, episodes_.size());
    letters_.push_back(ep.letters());
    seeds_.push_back(ep.seed);
    episodes_.push_back(std::move(ep));
  }

  const abs::SimConfig& config() const noexcept { return config_; }
  const abs::Vocabulary& vocab() const noexcept { return vocab_; }
  const std::vector<std::uint64_t>& seeds() const noexcept { return seeds_; }
  const std::vector<abs::Episode>& episodes() const noexcept { return episodes_; }
  std::size_t size() const noexcept { return episodes_.size(); }
  bool empty() const noexcept { return episodes_.empty(); }

  const ltlf::AbstractTrace& letters(std::size_t i) const { return letters_.at(i); }

  const abs::Episode* find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &episodes_[it->second];
  }
  const abs::Episode& at(const std::string& id) const {
    const auto* ep = find(id);
    if (!ep) throw NotFound("no episode '" + id + "'");
    return *ep;
  }

  std::size_t total_letters() const {
    std::size_t n = 0;
    for (const auto& t : letters_) n += t.size();
    return n;
  }

  friend bool operator==(const TraceLibrary& a, const TraceLibrary& b) {
    return a.config_ == b.config_ && a.vocab_ == b.vocab_ && a.episodes_ == b.episodes_;
  }

 private:
  abs::SimConfig config_;
  abs::Vocabulary vocab_;
  std::vector<abs::Episode> episodes_;
  std::vector<ltlf::AbstractTrace> letters_;
  std::vector<std::uint64_t> seeds_;
  std::unordered_map<std::string, std::size_t> index_;
};

// `episodes` episodes with seeds seed, seed+1, ...
inline TraceLibrary generate_library(const abs::SimConfig& config, std::size_t episodes, std::uint64_t seed,
                                     abs::AgentKind kind) {
  abs::validate(config);
  TraceLibrary lib(config);
  for (std::size_t i = 0; i < episodes; ++i) lib.add(abs::simulate(config, seed + i, kind));
  return lib;
}

inline json header_record(const TraceLibrary& lib) {
  return json{{"type", "header"},
              {"format", kFormatName},
              {"version", kFormatVersion},
              {"vocab", to_json(lib.vocab())},
              {"vocab_params", to_json(lib.config().vocab_params())},
              {"config", to_json(lib.config())},
              {"seeds", lib.seeds()},
              {"episodes", lib.size()}};
}

inline json episode_record(const abs::Episode& ep) {
  json rec = to_json(ep);
  rec["type"] = "episode";
  rec["checksum"] = hex64(fnv1a(rec.dump()));
  return rec;
}

inline void write_library(const TraceLibrary& lib, std::ostream& out) {
  out << header_record(lib).dump() << '\n';
  for (const auto& ep : lib.episodes()) out << episode_record(ep).dump() << '\n';
}

inline void save_library(const TraceLibrary& lib, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LibraryError("io_error", "cannot open '" + path + "' for writing", 0);
  write_library(lib, out);
  out.flush();
  if (!out) throw LibraryError("io_error", "write to '" + path + "' failed", 0);
}

inline TraceLibrary read_library(std::istream& in) {
  auto schema = [](std::size_t line, const std::string& msg) { return LibraryError("schema_error", msg, line); };
  std::string text;
  std::size_t line = 0;

  if (!std::getline(in, text)) throw schema(1, "empty library file");
  ++line;
  json header;
  try {
    header = json::parse(text);
  } catch (const json::parse_error& e) {
    throw schema(line, std::string("malformed JSON: ") + e.what());
  }
  if (!header.is_object() || header.value("type", "") != "header" || header.value("format", "") != kFormatName) {
    throw schema(line, "first record is not a library header");
  }
  if (!header.contains("version") || header["version"] != kFormatVersion) {
    throw LibraryError("version_mismatch",
                       "unsupported library version " + (header.contains("version") ? header["version"].dump() : "none") +
                           " (expected " + std::to_string(kFormatVersion) + ")",
                       line);
  }

  abs::SimConfig config;
  std::size_t expected = 0;
  try {
    config = sim_config_from_json(detail::field(header, "config", ""));
    expected = detail::get<std::size_t>(header, "episodes", "");
    abs::validate(config);
  } catch (const ValidationError& e) {
    throw schema(line, e.what());
  }
  TraceLibrary lib(config);

  // The declared vocabulary must be the one the config implies.
  std::vector<std::string> declared;
  try {
    for (const auto& d : detail::field(header, "vocab", "")) declared.push_back(detail::get<std::string>(d, "name", "vocab."));
  } catch (const ValidationError& e) {
    throw schema(line, e.what());
  } catch (const json::exception& e) {
    throw schema(line, std::string("vocab: ") + e.what());
  }
  if (declared != lib.vocab().names_list()) throw schema(line, "header vocab does not match the configured vocabulary");

  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error& e) {
      throw schema(line, std::string("malformed JSON: ") + e.what());
    }
    if (!rec.is_object() || rec.value("type", "") != "episode") throw schema(line, "expected an episode record");
    if (!rec.contains("checksum") || !rec["checksum"].is_string()) throw schema(line, "missing checksum");
    const std::string sum = rec["checksum"].get<std::string>();
    rec.erase("checksum");
    if (hex64(fnv1a(rec.dump())) != sum) throw LibraryError("checksum_mismatch", "record checksum mismatch", line);
    try {
      lib.add(episode_from_json(rec));
    } catch (const ValidationError& e) {
      throw schema(line, e.what());
    }
  }
  if (lib.size() != expected) {
    throw schema(line, "header declares " + std::to_string(expected) + " episodes, found " + std::to_string(lib.size()));
  }
  return lib;
}

inline TraceLibrary load_library(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LibraryError("io_error", "cannot open '" + path + "'", 0);
  return read_library(in);
}

}  // namespace tracequery::store
