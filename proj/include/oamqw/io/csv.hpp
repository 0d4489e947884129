#pragma once

#include "oamqw/analysis.hpp"
#include "oamqw/two_photon.hpp"
#include "oamqw/walk.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace oamqw::io {

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

// Sites from the first to the last with probability above `floor`, zeros
// inside that span included.
std::vector<int> support_span(const OamDistribution& d, double floor = 1e-15);

// Header "m,probability".
void write_distribution_csv(std::ostream& out, const OamDistribution& d);
OamDistribution read_distribution_csv(std::istream& in);
OamDistribution read_distribution_csv(const std::filesystem::path& path);

// Header "step,m,probability"; step k is entry k-1.
void write_intermediate_csv(std::ostream& out, const std::vector<OamDistribution>& steps);

// Nonzero entries only. Pre-BS rows list each unordered pair once (p <= q).
void write_joint_csv(std::ostream& out, const JointDistribution& j);
void write_oam_joint_csv(std::ostream& out, const OamJoint& j);
void write_violations_csv(std::ostream& out, const ViolationReport& r);

// Coincidence counts with header exactly "pol1,m1,pol2,m2,counts". Blank
// lines are skipped. With `merge`, (p, q) and (q, p) share a cell.
CountTable parse_counts(std::istream& in, bool merge = true);
CountTable ingest_counts(const std::filesystem::path& path, bool merge = true);

// Writes `content` to `path`, creating parent directories; IoError on failure.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace oamqw::io
