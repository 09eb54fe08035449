#include "hfl/report.hpp"

#include <cstdio>
#include <sstream>

namespace hfl {

std::string canonical_json(const json& j) {
    // nlohmann objects iterate in key order already; two-space indentation
    return j.dump(2) + "\n";
}

std::uint64_t config_hash(const json& config) {
    std::string text = canonical_json(config);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash_hex(const json& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(config)));
    return buf;
}

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) os << ',';
        bool quote = header[i].find_first_of(",\"\n") != std::string::npos;
        if (!quote) {
            os << header[i];
        } else {
            os << '"';
            for (char c : header[i]) {
                if (c == '"') os << '"';
                os << c;
            }
            os << '"';
        }
    }
    os << "\r\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << format_number(row[i]);
        }
        os << "\r\n";
    }
    return os.str();
}

}  // namespace hfl
