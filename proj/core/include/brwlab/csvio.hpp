#ifndef BRWLAB_CSVIO_HPP
#define BRWLAB_CSVIO_HPP

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include "brwlab/errors.hpp"

namespace brwlab {

// Shortest round-trip double formatting: deterministic across runs, exact on
// re-read.
inline std::string fmt_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, ptr);
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw ResourceError("cannot open output file '" + path + "'");
        write_row(header);
    }

    void write_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

} // namespace brwlab

#endif
