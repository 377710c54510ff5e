#include "roulab/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace roulab {

std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string series_csv(const std::string& col0, const std::string& col1,
                       std::span<const double> t, std::span<const double> x) {
    if (t.size() != x.size()) {
        throw std::invalid_argument("series_csv: column length mismatch");
    }
    std::string out = col0 + "," + col1 + "\n";
    for (std::size_t k = 0; k < t.size(); ++k) {
        out += fmt_g17(t[k]);
        out += ',';
        out += fmt_g17(x[k]);
        out += '\n';
    }
    return out;
}

void atomic_write(const std::filesystem::path& file, const std::string& content) {
    const auto parent = file.parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out.good()) {
            std::filesystem::remove(tmp);
            throw std::runtime_error("atomic_write: failed writing " + tmp);
        }
    }
    std::filesystem::rename(tmp, file);
}

std::string fnv1a_hex(const std::string& content) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : content) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace roulab
