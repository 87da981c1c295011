#include "spikelab/io.hpp"
#include "spikelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace spikelab::io {

struct CsvWriter::Impl {
    std::ofstream os;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    ensure_directory(std::filesystem::path(path).parent_path().string());
    impl_->os.open(path);
    if (!impl_->os) {
        delete impl_;
        throw io_error("cannot open " + path);
    }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::header(const std::string& line) { impl_->os << line << "\n"; }

void CsvWriter::row(const std::vector<double>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += format_double(values[i]);
    }
    impl_->os << line << "\n";
}

void CsvWriter::raw(const std::string& line) { impl_->os << line << "\n"; }

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ensure_directory(const std::string& path) {
    if (path.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
}

void write_json(const nlohmann::json& j, const std::string& path) {
    ensure_directory(std::filesystem::path(path).parent_path().string());
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path);
    os << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open " + path);
    nlohmann::json j;
    is >> j;
    return j;
}

std::string colormap_hex(double t) {
    t = std::clamp(t, 0.0, 1.0);
    // stops: dark blue, blue, cyan-ish, yellow, red
    static const double stops[5][3] = {
        {13, 8, 135}, {84, 39, 214}, {139, 10, 165}, {219, 92, 104}, {240, 249, 33}};
    double x = t * 4.0;
    int k = std::min(3, static_cast<int>(x));
    double f = x - k;
    int r = static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0])));
    int g = static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1])));
    int b = static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2])));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

void write_matrix_svg(const std::vector<std::vector<double>>& rows, const std::string& path,
                      int width, int height) {
    if (rows.empty() || rows[0].empty()) throw io_error("empty matrix for SVG export");
    double lo = rows[0][0], hi = rows[0][0];
    for (const auto& r : rows)
        for (double v : r) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (hi <= lo) hi = lo + 1;
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "'>\n";
    double cw = double(width) / rows[0].size();
    double ch = double(height) / rows.size();
    for (std::size_t j = 0; j < rows.size(); ++j) {
        double y = height - (j + 1) * ch; // first row at the bottom
        for (std::size_t i = 0; i < rows[j].size(); ++i) {
            double t = (rows[j][i] - lo) / (hi - lo);
            svg << "<rect x='" << i * cw << "' y='" << y << "' width='" << cw + 0.5
                << "' height='" << ch + 0.5 << "' fill='" << colormap_hex(t) << "'/>\n";
        }
    }
    svg << "<rect x='0' y='0' width='" << width << "' height='" << height
        << "' fill='none' stroke='black'/>\n</svg>\n";
    ensure_directory(std::filesystem::path(path).parent_path().string());
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path);
    os << svg.str();
}

} // namespace spikelab::io
