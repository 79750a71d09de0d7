#include "pir/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace pir {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

[[noreturn]] void fail_at(const std::string& path, std::size_t offset, const std::string& what) {
    throw IoError(path + ": " + what + " (byte offset " + std::to_string(offset) + ")");
}

// PGM token scanner that skips whitespace and '#' comments, tracking offsets.
struct PgmScanner {
    const std::string& path;
    const std::string& data;
    std::size_t pos = 0;

    void skip_ws_comments() {
        while (pos < data.size()) {
            char c = data[pos];
            if (c == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }
    long long next_int() {
        skip_ws_comments();
        std::size_t start = pos;
        bool any = false;
        long long v = 0;
        while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
            v = v * 10 + (data[pos] - '0');
            ++pos;
            any = true;
        }
        if (!any) fail_at(path, start, "expected integer in PGM header");
        return v;
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

CountGrid read_pgm(const std::string& path) {
    std::string data = slurp(path);
    if (data.size() < 2 || data[0] != 'P' || (data[1] != '2' && data[1] != '5'))
        fail_at(path, 0, "not a P2/P5 PGM file");
    bool binary = data[1] == '5';
    PgmScanner sc{path, data, 2};
    long long w = sc.next_int();
    long long h = sc.next_int();
    long long maxval = sc.next_int();
    if (w <= 0 || h <= 0) fail_at(path, sc.pos, "nonpositive dimensions");
    if (maxval <= 0 || maxval > 65535) fail_at(path, sc.pos, "maxval outside 1..65535");
    CountGrid g(static_cast<int>(h), static_cast<int>(w));
    if (binary) {
        if (sc.pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[sc.pos])))
            fail_at(path, sc.pos, "missing whitespace before raster");
        ++sc.pos;  // single whitespace byte separates header and raster
        int bytes = maxval > 255 ? 2 : 1;
        std::size_t need = static_cast<std::size_t>(w) * h * bytes;
        if (data.size() - sc.pos < need) fail_at(path, data.size(), "truncated raster");
        const unsigned char* p = reinterpret_cast<const unsigned char*>(data.data()) + sc.pos;
        for (int i = 0; i < g.n(); ++i) {
            long long v = bytes == 2 ? (static_cast<long long>(p[0]) << 8) | p[1] : p[0];
            p += bytes;
            if (v > maxval) fail_at(path, sc.pos + static_cast<std::size_t>(i) * bytes, "sample above maxval");
            g.v[i] = v;
        }
    } else {
        for (int i = 0; i < g.n(); ++i) {
            long long v = sc.next_int();
            if (v > maxval) fail_at(path, sc.pos, "sample above maxval");
            g.v[i] = v;
        }
    }
    return g;
}

void write_pgm(const std::string& path, const CountGrid& g, bool binary) {
    long long maxval = 1;
    for (auto v : g.v) {
        if (v < 0) throw IoError(path + ": negative count cannot be written as PGM");
        maxval = std::max(maxval, static_cast<long long>(v));
    }
    if (maxval > 65535) throw IoError(path + ": sample above 65535 does not fit PGM");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << (binary ? "P5" : "P2") << "\n" << g.w << " " << g.h << "\n" << maxval << "\n";
    if (binary) {
        int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raster(static_cast<std::size_t>(g.n()) * bytes);
        for (int i = 0; i < g.n(); ++i) {
            long long v = g.v[i];
            if (bytes == 2) {
                raster[2 * i] = static_cast<unsigned char>(v >> 8);
                raster[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
            } else {
                raster[i] = static_cast<unsigned char>(v);
            }
        }
        out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    } else {
        for (int i = 0; i < g.h; ++i) {
            for (int j = 0; j < g.w; ++j) out << g.at(i, j) << (j + 1 == g.w ? "" : " ");
            out << "\n";
        }
    }
    if (!out) throw IoError(path + ": write failed");
}

ImageGrid read_csv_grid(const std::string& path) {
    std::string data = slurp(path);
    std::vector<std::vector<double>> rows;
    std::size_t pos = 0, line_start = 0;
    std::string line;
    while (pos <= data.size()) {
        if (pos == data.size() || data[pos] == '\n') {
            line = data.substr(line_start, pos - line_start);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) {
                std::vector<double> row;
                std::size_t p = 0;
                while (p <= line.size()) {
                    std::size_t comma = line.find(',', p);
                    std::string tok = line.substr(p, comma == std::string::npos ? std::string::npos : comma - p);
                    try {
                        std::size_t used = 0;
                        double v = std::stod(tok, &used);
                        if (used != tok.size()) throw std::invalid_argument("trailing");
                        row.push_back(v);
                    } catch (...) {
                        fail_at(path, line_start + p, "malformed number '" + tok + "'");
                    }
                    if (comma == std::string::npos) break;
                    p = comma + 1;
                }
                if (!rows.empty() && row.size() != rows[0].size())
                    fail_at(path, line_start, "ragged row (dimension mismatch)");
                rows.push_back(std::move(row));
            }
            line_start = pos + 1;
        }
        ++pos;
    }
    if (rows.empty()) fail_at(path, 0, "empty CSV grid");
    ImageGrid g(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int i = 0; i < g.h; ++i)
        for (int j = 0; j < g.w; ++j) g.at(i, j) = rows[i][j];
    return g;
}

void write_csv_grid(const std::string& path, const ImageGrid& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    for (int i = 0; i < g.h; ++i) {
        for (int j = 0; j < g.w; ++j) out << format_double(g.at(i, j)) << (j + 1 == g.w ? "" : ",");
        out << "\n";
    }
    if (!out) throw IoError(path + ": write failed");
}

namespace {

bool has_suffix(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

}  // namespace

ImageGrid read_image(const std::string& path) {
    if (has_suffix(path, ".pgm")) return to_image(read_pgm(path));
    if (has_suffix(path, ".csv")) return read_csv_grid(path);
    throw IoError(path + ": unsupported extension (want .pgm or .csv)");
}

void write_image(const std::string& path, const ImageGrid& g) {
    if (has_suffix(path, ".csv")) {
        write_csv_grid(path, g);
        return;
    }
    if (has_suffix(path, ".pgm")) {
        CountGrid c(g.h, g.w);
        for (int i = 0; i < g.n(); ++i) {
            double r = std::round(g.v[i]);
            if (r < 0 || r > 65535 || std::fabs(r - g.v[i]) > 1e-9)
                throw IoError(path + ": non-integer or out-of-range value for PGM; use .csv or the scaled writer");
            c.v[i] = static_cast<std::int64_t>(r);
        }
        write_pgm(path, c, true);
        return;
    }
    throw IoError(path + ": unsupported extension (want .pgm or .csv)");
}

void write_pgm16_scaled(const std::string& path, const ImageGrid& g) {
    double maxv = 0.0;
    for (double x : g.v) maxv = std::max(maxv, x);
    double scale = maxv > 0.0 ? 65535.0 / maxv : 1.0;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "P5\n# scale=" << format_double(scale) << "\n" << g.w << " " << g.h << "\n" << 65535 << "\n";
    std::vector<unsigned char> raster(static_cast<std::size_t>(g.n()) * 2);
    for (int i = 0; i < g.n(); ++i) {
        double q = std::round(std::max(g.v[i], 0.0) * scale);
        long long v = static_cast<long long>(std::min(q, 65535.0));
        raster[2 * i] = static_cast<unsigned char>(v >> 8);
        raster[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!out) throw IoError(path + ": write failed");
}

void emit_trace(const SolveTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "iter,objective,mu,rel_change,nmse\n";
    for (const auto& r : trace.rows) {
        out << r.t << "," << format_double(r.objective) << ",";
        if (r.has_mu) out << format_double(r.mu);
        out << ",";
        if (r.t > 0) out << format_double(r.rel_change);
        out << ",";
        if (r.has_nmse) out << format_double(r.nmse);
        out << "\n";
    }
    if (!out) throw IoError(path + ": write failed");
}

}  // namespace pir
