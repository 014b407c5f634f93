#include "ranksort/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ranksort::io {
namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (const char c : s) {
        if (c == sep) {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

double parse_double_or(const std::string& text, const std::string& file,
                       std::size_t line) {
    const std::string t = trim(text);
    try {
        std::size_t consumed = 0;
        const double v = std::stod(t, &consumed);
        if (consumed != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ParseError(file, line, "expected a number, got '" + t + "'");
    }
}

}  // namespace

ParseError::ParseError(const std::string& file, std::size_t line,
                       const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
      file_(file),
      line_(line) {}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path, 0, "cannot open config file");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_string(text.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& name) {
    Config config;
    config.name_ = name;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError(name, line_no, "malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ParseError(name, line_no, "empty section name");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(name, line_no, "expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ParseError(name, line_no, "empty key");
        }
        if (section.empty()) {
            throw ParseError(name, line_no, "key outside any [section]");
        }
        config.entries_[section + "." + key] = {trim(line.substr(eq + 1)), line_no};
    }
    return config;
}

const Config::Entry* Config::find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void Config::fail(const Entry& entry, const std::string& message) const {
    throw ParseError(name_, entry.line, message);
}

bool Config::has(const std::string& key) const { return find(key) != nullptr; }

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    try {
        std::size_t consumed = 0;
        const double v = std::stod(e->value, &consumed);
        if (consumed != e->value.size()) fail(*e, "trailing characters after number");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        fail(*e, "expected a number for '" + key + "', got '" + e->value + "'");
    }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::uint64_t v = 0;
    const char* begin = e->value.data();
    const char* end = begin + e->value.size();
    const auto result = std::from_chars(begin, end, v);
    if (result.ec != std::errc{} || result.ptr != end) {
        fail(*e, "expected an unsigned integer for '" + key + "', got '" + e->value + "'");
    }
    return v;
}

std::vector<double> Config::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::vector<double> values;
    for (const std::string& part : split(e->value, ',')) {
        const std::string t = trim(part);
        if (t.empty()) fail(*e, "empty element in list '" + key + "'");
        values.push_back(parse_double_or(t, name_, e->line));
    }
    return values;
}

std::vector<std::string> Config::get_string_list(
    const std::string& key, const std::vector<std::string>& fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::vector<std::string> values;
    for (const std::string& part : split(e->value, ',')) {
        const std::string t = trim(part);
        if (t.empty()) fail(*e, "empty element in list '" + key + "'");
        values.push_back(t);
    }
    return values;
}

ProblemFile read_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path, 0, "cannot open problem file");
    }
    std::string raw;
    std::size_t line_no = 0;
    bool saw_header = false;

    std::vector<double> logits, labels;
    std::vector<Box> boxes_pred, boxes_gt;
    std::size_t positives_with_boxes = 0, positives_total = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line.rfind("logit", 0) != 0) {
                throw ParseError(path, line_no, "missing header line 'logit,label[,...]'");
            }
            saw_header = true;
            continue;
        }
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != 2 && fields.size() != 10) {
            throw ParseError(path, line_no,
                             "expected 2 or 10 comma-separated fields, got " +
                                 std::to_string(fields.size()));
        }
        const double logit = parse_double_or(fields[0], path, line_no);
        const double label = parse_double_or(fields[1], path, line_no);
        logits.push_back(logit);
        labels.push_back(label);
        if (label > 0.0) ++positives_total;
        if (fields.size() == 10) {
            if (!(label > 0.0)) {
                throw ParseError(path, line_no, "box fields on a negative row");
            }
            double v[8];
            for (std::size_t k = 0; k < 8; ++k) {
                v[k] = parse_double_or(fields[2 + k], path, line_no);
            }
            try {
                boxes_pred.push_back(Box(v[0], v[1], v[2], v[3]));
                boxes_gt.push_back(Box(v[4], v[5], v[6], v[7]));
            } catch (const std::exception& e) {
                throw ParseError(path, line_no, e.what());
            }
            ++positives_with_boxes;
        }
    }
    if (!saw_header) {
        throw ParseError(path, line_no, "empty problem file");
    }
    if (logits.empty()) {
        throw ParseError(path, line_no, "no example rows");
    }
    if (positives_with_boxes != 0 && positives_with_boxes != positives_total) {
        throw ParseError(path, line_no,
                         "box fields must appear on all positives or none");
    }

    ProblemFile out;
    try {
        out.problem = RankingProblem(std::move(logits), std::move(labels));
    } catch (const std::exception& e) {
        throw ParseError(path, line_no, e.what());
    }
    out.boxes_pred = std::move(boxes_pred);
    out.boxes_gt = std::move(boxes_gt);
    return out;
}

std::string format_double(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);  // LF on every platform
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    out << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out << ",";
            out << row[k];
        }
        out << "\n";
    }
    if (!out) {
        throw std::runtime_error("failed writing output file: " + path);
    }
}

}  // namespace ranksort::io
