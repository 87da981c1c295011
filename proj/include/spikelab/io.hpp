#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace spikelab::io {

/// Line-buffered CSV writer with fixed %.17g formatting so reruns are
/// byte-identical.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    void header(const std::string& line);
    void row(const std::vector<double>& values);
    void raw(const std::string& line);

private:
    struct Impl;
    Impl* impl_;
};

std::string format_double(double v);

/// Writes JSON with a trailing newline, creating parent directories.
void write_json(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json(const std::string& path);

void ensure_directory(const std::string& path);

/// Blue->white->red style colormap on [0,1] as an SVG hex color.
std::string colormap_hex(double t);

/// Minimal SVG raster of a matrix (rows bottom-up), with axes box.
void write_matrix_svg(const std::vector<std::vector<double>>& rows, const std::string& path,
                      int width = 720, int height = 540);

} // namespace spikelab::io
