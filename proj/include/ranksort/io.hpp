#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ranksort/core.hpp"
#include "ranksort/localisation.hpp"

namespace ranksort::io {

/// Parse or validation failure carrying "file:line: message" context.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& message);

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// Flat sectioned key-value configuration:
///
///   # comment
///   [section]
///   key = value
///
/// Keys are looked up as "section.key". Typed getters fall back to the
/// given default when the key is absent and raise ParseError (with the
/// defining line) when a value does not parse.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text,
                               const std::string& name = "<config>");

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<std::string> get_string_list(
        const std::string& key, const std::vector<std::string>& fallback) const;

private:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };
    std::string name_;
    std::map<std::string, Entry> entries_;

    const Entry* find(const std::string& key) const;
    [[noreturn]] void fail(const Entry& entry, const std::string& message) const;
};

/// A ranking problem plus optional box pairs, as read from a problem file.
/// Box vectors are either empty or aligned with the positives in ascending
/// index order.
struct ProblemFile {
    RankingProblem problem{{0.0}, {0.0}};
    std::vector<Box> boxes_pred;
    std::vector<Box> boxes_gt;
};

/// Line-delimited problem records with a mandatory header line:
///
///   logit,label[,x1,y1,x2,y2,gx1,gy1,gx2,gy2]
///
/// Rows carry 2 or 10 comma-separated fields; box fields are only valid on
/// positive rows and must appear on all positives or none.
ProblemFile read_problem_file(const std::string& path);

/// Shortest-width formatting that round-trips doubles exactly, shared by
/// every CSV writer so outputs are byte-stable.
std::string format_double(double value);

/// Writes header + rows with LF line endings, failing on I/O errors.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace ranksort::io
