// Plot-ready CSV output: UTF-8, LF line endings, shortest round-trip floats.
#ifndef RIVERDP_CSV_HPP
#define RIVERDP_CSV_HPP

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include "riverdp/errors.hpp"

namespace riverdp {

inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot open output file '" + path + "'");
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
    }

    void field(double v) { next(); out_ << format_double(v); }
    void field(int v) { next(); out_ << v; }
    void field(long v) { next(); out_ << v; }
    void field(std::size_t v) { next(); out_ << v; }
    void field(const std::string& v) { next(); out_ << v; }
    void end_row() {
        out_ << '\n';
        first_ = true;
    }

private:
    void next() {
        if (!first_) out_ << ',';
        first_ = false;
    }
    std::ofstream out_;
    bool first_ = true;
};

// Min-max normalization to [0, 1]; constant series map to 0.
inline std::vector<double> normalize_series(const std::vector<double>& v) {
    double lo = v.empty() ? 0.0 : v[0];
    double hi = lo;
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    std::vector<double> out(v.size(), 0.0);
    if (hi > lo) {
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lo) / (hi - lo);
    }
    return out;
}

} // namespace riverdp

#endif
