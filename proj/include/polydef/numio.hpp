#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "error.hpp"

namespace polydef {

// Canonical text form for doubles in every file this library emits.
// %.12g round-trips all values we produce (they carry at most 12
// significant decimal digits by construction), so write -> read -> write
// is byte-stable.
inline std::string fmt_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string fmt_fixed(double v, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

// Whitespace token scanner with line tracking and '#' comments running to
// end of line. Used by the plain-text readers (.eig, .kpath, convergence
// logs) so parse errors can say where they happened.
class TokenScanner {
public:
    TokenScanner(std::string text, std::string source)
        : text_(std::move(text)), source_(std::move(source)) {}

    // Next token, or empty string at end of input.
    std::string next() {
        skip_space_and_comments();
        if (pos_ >= text_.size()) return {};
        std::size_t start = pos_;
        while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '#') ++pos_;
        return text_.substr(start, pos_ - start);
    }

    // Peek without consuming.
    std::string peek() {
        std::size_t save_pos = pos_;
        int save_line = line_;
        std::string t = next();
        pos_ = save_pos;
        line_ = save_line;
        return t;
    }

    std::string expect(const std::string& literal) {
        std::string t = next();
        if (t != literal)
            fail_parse(source_ + ":" + std::to_string(line_) + ": expected '" + literal +
                       "', got '" + (t.empty() ? "<eof>" : t) + "'");
        return t;
    }

    double next_double() {
        std::string t = next();
        if (t.empty())
            fail_parse(source_ + ":" + std::to_string(line_) + ": expected number, got end of input");
        char* end = nullptr;
        double v = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size())
            fail_parse(source_ + ":" + std::to_string(line_) + ": expected number, got '" + t + "'");
        return v;
    }

    long next_long() {
        std::string t = next();
        if (t.empty())
            fail_parse(source_ + ":" + std::to_string(line_) + ": expected integer, got end of input");
        char* end = nullptr;
        long v = std::strtol(t.c_str(), &end, 10);
        if (end != t.c_str() + t.size())
            fail_parse(source_ + ":" + std::to_string(line_) + ": expected integer, got '" + t + "'");
        return v;
    }

    bool at_end() { return peek().empty(); }

    int line() const { return line_; }
    const std::string& source() const { return source_; }

    [[noreturn]] void fail(const std::string& msg) const {
        fail_parse(source_ + ":" + std::to_string(line_) + ": " + msg);
    }

private:
    static bool is_space(char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    }

    void skip_space_and_comments() {
        for (;;) {
            while (pos_ < text_.size() && is_space(text_[pos_])) {
                if (text_[pos_] == '\n') ++line_;
                ++pos_;
            }
            if (pos_ < text_.size() && text_[pos_] == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
                continue;
            }
            return;
        }
    }

    std::string text_;
    std::string source_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

// Pairwise (cascade) summation. The tree shape depends only on the element
// count, not on how work was split across threads, so totals are
// bit-identical for any thread count.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = v[0];
        for (std::size_t i = 1; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

} // namespace polydef
