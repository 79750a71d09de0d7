#pragma once

#include <stdexcept>
#include <string>

#include "pir/grid.hpp"
#include "pir/solvers.hpp"

namespace pir {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// PGM P2/P5, maxval <= 65535; P5 uses big-endian 2-byte samples above 255.
CountGrid read_pgm(const std::string& path);
void write_pgm(const std::string& path, const CountGrid& g, bool binary = true);

// Headerless CSV of decimals, 17 significant digits.
ImageGrid read_csv_grid(const std::string& path);
void write_csv_grid(const std::string& path, const ImageGrid& g);

// Dispatch on extension: .pgm (integer data) or .csv (real data).
ImageGrid read_image(const std::string& path);
void write_image(const std::string& path, const ImageGrid& g);

// Display form: quantized to 16-bit PGM; the scale factor is recorded in a
// header comment line "# scale=<value>" (stored = round(value*scale)).
void write_pgm16_scaled(const std::string& path, const ImageGrid& g);

// CSV columns exactly: iter, objective, mu, rel_change, nmse.
void emit_trace(const SolveTrace& trace, const std::string& path);

std::string format_double(double v);  // %.17g

}  // namespace pir
