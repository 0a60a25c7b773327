#include "parapedia/corpus_store.hpp"

#include <fstream>
#include <sstream>

#include "parapedia/hashing.hpp"

namespace parapedia::store {

void write_text_atomic(const fs::path& file, const std::string& content) {
    fs::create_directories(file.parent_path());
    fs::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, file);
}

void write_lines_atomic(const fs::path& file, const std::vector<std::string>& lines) {
    std::string content;
    for (const auto& line : lines) {
        content += line;
        content += '\n';
    }
    write_text_atomic(file, content);
}

void write_json_atomic(const fs::path& file, const Json& j) {
    write_text_atomic(file, j.dump(2) + "\n");
}

std::string read_text(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<Json> read_jsonl(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    std::vector<Json> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(Json::parse(line));
    }
    return out;
}

Json read_json(const fs::path& file) { return Json::parse(read_text(file)); }

std::string checksum_text(const std::string& content) {
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(content)));
    return buf;
}

}  // namespace parapedia::store
