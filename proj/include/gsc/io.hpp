#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace gsc {

/// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);

/// CSV writer with a mandatory header row; numeric cells use the shortest
/// round-trip format.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& cells);

private:
    std::ofstream os_;
    std::size_t width_;
};

}  // namespace gsc
