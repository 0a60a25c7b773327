#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "parapedia/domain.hpp"

// JSONL corpus persistence. One JSON object per line, one file per record
// kind, UTF-8; writes go through a temp file and rename so snapshots are
// all-or-nothing.
namespace parapedia::store {

namespace fs = std::filesystem;

void write_text_atomic(const fs::path& file, const std::string& content);
void write_lines_atomic(const fs::path& file, const std::vector<std::string>& lines);
void write_json_atomic(const fs::path& file, const Json& j);

std::string read_text(const fs::path& file);
std::vector<Json> read_jsonl(const fs::path& file);
Json read_json(const fs::path& file);

// fnv1a64 hex digest of a file's bytes (config/template audit trail).
std::string checksum_text(const std::string& content);

struct RunPaths {
    fs::path dir;
    fs::path config() const { return dir / "config.json"; }
    fs::path subjects() const { return dir / "subjects.jsonl"; }
    fs::path articles() const { return dir / "articles.jsonl"; }
    fs::path candidates() const { return dir / "candidates.jsonl"; }
    fs::path funnel() const { return dir / "funnel.json"; }
    fs::path index() const { return dir / "index.jsonl"; }
    fs::path queues() const { return dir / "queues.jsonl"; }
    fs::path evaluation() const { return dir / "evaluation.jsonl"; }
    fs::path report() const { return dir / "report.md"; }
    fs::path similarity() const { return dir / "similarity.jsonl"; }
};

}  // namespace parapedia::store
