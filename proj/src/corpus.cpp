#include "serts/corpus.hpp"

#include <cstdint>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "serts/error.hpp"

namespace serts {

namespace {

// Unicode whitespace code points (White_Space=yes).
bool is_unicode_space(char32_t cp) {
    switch (cp) {
        case 0x0009: case 0x000A: case 0x000B: case 0x000C: case 0x000D:
        case 0x0020: case 0x0085: case 0x00A0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_ascii_punct(char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
           (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

// Decodes one UTF-8 code point starting at `i`; advances `i` past it.
// Malformed bytes are passed through as single-byte code points.
char32_t next_code_point(const std::string& s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if ((b0 & 0xE0u) == 0xC0u) { len = 2; cp = b0 & 0x1Fu; }
    else if ((b0 & 0xF0u) == 0xE0u) { len = 3; cp = b0 & 0x0Fu; }
    else if ((b0 & 0xF8u) == 0xF0u) { len = 4; cp = b0 & 0x07u; }
    if (len > 1) {
        if (i + len > s.size()) { ++i; return b0; }
        for (std::size_t k = 1; k < len; ++k) {
            const auto bk = static_cast<unsigned char>(s[i + k]);
            if ((bk & 0xC0u) != 0x80u) { ++i; return b0; }
            cp = (cp << 6) | (bk & 0x3Fu);
        }
    }
    i += len;
    return cp;
}

void flush_token(std::string& tok, std::vector<std::string>& out) {
    std::size_t begin = 0;
    std::size_t end = tok.size();
    while (begin < end && is_ascii_punct(tok[begin])) ++begin;
    while (end > begin && is_ascii_punct(tok[end - 1])) --end;
    if (end > begin) out.emplace_back(tok.substr(begin, end - begin));
    tok.clear();
}

nlohmann::json parse_record(const std::string& line, const std::string& path, std::size_t lineno) {
    nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
        throw IoError(path + ": malformed record at line " + std::to_string(lineno));
    }
    return rec;
}

std::string require_string(const nlohmann::json& rec, const char* field,
                           const std::string& path, std::size_t lineno) {
    auto it = rec.find(field);
    if (it == rec.end() || !it->is_string()) {
        throw IoError(path + ": missing or non-string \"" + field + "\" at line " +
                      std::to_string(lineno));
    }
    return it->get<std::string>();
}

} // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t start = i;
        const char32_t cp = next_code_point(text, i);
        if (is_unicode_space(cp)) {
            flush_token(current, tokens);
            continue;
        }
        if (cp < 0x80) {
            char c = static_cast<char>(cp);
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            current.push_back(c);
        } else {
            current.append(text, start, i - start);
        }
    }
    flush_token(current, tokens);
    return tokens;
}

Corpus::Corpus(std::vector<Document> docs) : docs_(std::move(docs)) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        by_id_.emplace(docs_[i].id, i);
        total += docs_[i].token_count;
    }
    avg_doc_len_ = docs_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(docs_.size());
}

std::optional<std::size_t> Corpus::ordinal_of(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

const Document* Corpus::find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &docs_[it->second];
}

std::vector<const Document*> Corpus::resolve(const std::vector<std::string>& ids) const {
    std::vector<const Document*> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        const Document* doc = find(id);
        if (doc == nullptr) throw IoError("unknown document id: " + id);
        out.push_back(doc);
    }
    return out;
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);

    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const nlohmann::json rec = parse_record(line, path, lineno);
        Document doc;
        doc.id = require_string(rec, "id", path, lineno);
        doc.text = require_string(rec, "text", path, lineno);
        if (doc.id.empty()) {
            throw IoError(path + ": empty id at line " + std::to_string(lineno));
        }
        if (!seen.insert(doc.id).second) {
            throw IoError(path + ": duplicate id \"" + doc.id + "\" at line " +
                          std::to_string(lineno));
        }
        doc.token_count = tokenize(doc.text).size();
        docs.push_back(std::move(doc));
    }
    return Corpus(std::move(docs));
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write corpus file: " + path);
    for (const auto& doc : corpus.docs()) {
        nlohmann::json rec{{"id", doc.id}, {"text", doc.text}};
        out << rec.dump() << '\n';
    }
    if (!out) throw IoError("failed writing corpus file: " + path);
}

std::vector<Question> load_questions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open questions file: " + path);

    std::vector<Question> questions;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const nlohmann::json rec = parse_record(line, path, lineno);
        Question q;
        q.id = require_string(rec, "id", path, lineno);
        q.text = require_string(rec, "text", path, lineno);
        if (q.id.empty()) {
            throw IoError(path + ": empty id at line " + std::to_string(lineno));
        }
        if (!seen.insert(q.id).second) {
            throw IoError(path + ": duplicate id \"" + q.id + "\" at line " +
                          std::to_string(lineno));
        }
        if (auto it = rec.find("gold_doc_ids"); it != rec.end() && !it->is_null()) {
            if (!it->is_array()) {
                throw IoError(path + ": \"gold_doc_ids\" must be an array at line " +
                              std::to_string(lineno));
            }
            for (const auto& v : *it) {
                if (!v.is_string()) {
                    throw IoError(path + ": non-string gold doc id at line " +
                                  std::to_string(lineno));
                }
                q.gold_doc_ids.insert(v.get<std::string>());
            }
        }
        if (auto it = rec.find("ideal_answer"); it != rec.end() && !it->is_null()) {
            if (!it->is_string()) {
                throw IoError(path + ": \"ideal_answer\" must be a string at line " +
                              std::to_string(lineno));
            }
            q.ideal_answer = it->get<std::string>();
        }
        questions.push_back(std::move(q));
    }
    return questions;
}

} // namespace serts
