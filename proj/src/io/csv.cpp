#include "oamqw/io/csv.hpp"

#include "oamqw/errors.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace oamqw::io {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
    }
    return out;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t") == std::string::npos; }

template <class T>
bool parse_exact(const std::string& s, T& v) {
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    return ec == std::errc{} && ptr == last && first != last;
}

std::string label_fields(const Label& l) {
    return to_string(l.pol) + "," + std::to_string(l.m);
}

}  // namespace

std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) {
        throw IoError("cannot format number");
    }
    return {buf.data(), ptr};
}

std::vector<int> support_span(const OamDistribution& d, double floor) {
    int lo = 0;
    int hi = -1;
    bool any = false;
    for (const auto& [m, p] : d.probs) {
        if (p > floor) {
            if (!any) {
                lo = m;
                any = true;
            }
            hi = m;
        }
    }
    std::vector<int> out;
    for (int m = lo; any && m <= hi; ++m) {
        out.push_back(m);
    }
    return out;
}

void write_distribution_csv(std::ostream& out, const OamDistribution& d) {
    out << "m,probability\n";
    for (int m : support_span(d)) {
        out << m << ',' << format_double(d.at(m)) << '\n';
    }
}

OamDistribution read_distribution_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) {
        throw ParseError(1, "missing header");
    }
    ++lineno;
    strip_cr(line);
    if (line != "m,probability") {
        throw ParseError(lineno, "expected header 'm,probability'");
    }
    OamDistribution d;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (blank(line)) {
            continue;
        }
        const auto f = split_fields(line);
        int m = 0;
        double p = 0.0;
        if (f.size() != 2 || !parse_exact(f[0], m) || !parse_exact(f[1], p)) {
            throw ParseError(lineno, "expected 'm,probability'");
        }
        if (!d.probs.emplace(m, p).second) {
            throw ParseError(lineno, "duplicate m = " + std::to_string(m));
        }
    }
    return d;
}

OamDistribution read_distribution_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return read_distribution_csv(in);
}

void write_intermediate_csv(std::ostream& out, const std::vector<OamDistribution>& steps) {
    out << "step,m,probability\n";
    for (std::size_t k = 0; k < steps.size(); ++k) {
        for (int m : support_span(steps[k])) {
            out << (k + 1) << ',' << m << ',' << format_double(steps[k].at(m)) << '\n';
        }
    }
}

void write_joint_csv(std::ostream& out, const JointDistribution& j) {
    out << "pol1,m1,pol2,m2,probability\n";
    const auto n = static_cast<Eigen::Index>(j.labels.size());
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = j.stage == Stage::pre_bs ? a : 0; b < n; ++b) {
            const double p = j.probs(a, b);
            if (p != 0.0) {
                out << label_fields(j.labels[static_cast<std::size_t>(a)]) << ','
                    << label_fields(j.labels[static_cast<std::size_t>(b)]) << ',' << format_double(p)
                    << '\n';
            }
        }
    }
}

void write_oam_joint_csv(std::ostream& out, const OamJoint& j) {
    out << "m1,m2,probability\n";
    for (const auto& [key, p] : j) {
        if (p != 0.0) {
            out << key.first << ',' << key.second << ',' << format_double(p) << '\n';
        }
    }
}

void write_violations_csv(std::ostream& out, const ViolationReport& r) {
    out << "kind,pol1,m1,pol2,m2,t,sigma_t,significance\n";
    for (const auto& v : r.pairs) {
        out << to_string(r.kind) << ',' << label_fields(v.p) << ',' << label_fields(v.q) << ','
            << format_double(v.t) << ',' << (v.sigma_t ? format_double(*v.sigma_t) : "") << ','
            << (v.significance ? format_double(*v.significance) : "") << '\n';
    }
}

CountTable parse_counts(std::istream& in, bool merge) {
    CountTable table;
    table.merged = merge;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) {
        throw ParseError(1, "missing header 'pol1,m1,pol2,m2,counts'");
    }
    ++lineno;
    strip_cr(line);
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }
    if (split_fields(line) != std::vector<std::string>{"pol1", "m1", "pol2", "m2", "counts"}) {
        throw ParseError(lineno, "expected header 'pol1,m1,pol2,m2,counts'");
    }
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (blank(line)) {
            continue;
        }
        const auto f = split_fields(line);
        if (f.size() != 5) {
            throw ParseError(lineno, "expected 5 fields, found " + std::to_string(f.size()));
        }
        Label p;
        Label q;
        try {
            p.pol = parse_pol_label(f[0]);
            q.pol = parse_pol_label(f[2]);
        } catch (const InvalidParameter& e) {
            throw ParseError(lineno, e.what());
        }
        if (!parse_exact(f[1], p.m) || !parse_exact(f[3], q.m)) {
            throw ParseError(lineno, "OAM values must be integers");
        }
        std::int64_t n = 0;
        if (!parse_exact(f[4], n)) {
            throw ParseError(lineno, "counts must be an integer, got '" + f[4] + "'");
        }
        if (n < 0) {
            throw NegativeCount("line " + std::to_string(lineno) + ": negative count " +
                                std::to_string(n));
        }
        table.add(p, q, n);
    }
    return table;
}

CountTable ingest_counts(const std::filesystem::path& path, bool merge) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return parse_counts(in, merge);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << content;
    out.close();
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

}  // namespace oamqw::io
