#include "gsc/io.hpp"

#include <charconv>
#include <stdexcept>

namespace gsc {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : os_(path), width_(header.size()) {
    if (!os_) throw std::runtime_error("csv: cannot open " + path);
    raw_row(header);
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != width_) throw std::logic_error("csv: row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os_ << ',';
        os_ << format_double(values[i]);
    }
    os_ << '\n';
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv: row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os_ << ',';
        os_ << cells[i];
    }
    os_ << '\n';
}

}  // namespace gsc
