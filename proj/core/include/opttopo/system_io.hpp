#ifndef OPTTOPO_SYSTEM_IO_HPP
#define OPTTOPO_SYSTEM_IO_HPP

#include <string>

#include "opttopo/graph.hpp"
#include "opttopo/identify.hpp"
#include "opttopo/solver.hpp"

namespace opttopo {

// File formats are versioned with a magic first line; parsers reject unknown
// versions with VersionMismatch. Numbers round-trip bit-exactly.
inline constexpr const char* kSystemMagic = "#opttopo-system v1";
inline constexpr const char* kTableMagic = "#opttopo-table v1";

/// System document <-> validated graph. parse_system(serialize_system(g)) == g.
std::string serialize_system(const SystemGraph& g);
SystemGraph parse_system(const std::string& text);

SystemGraph load_system(const std::string& path);
void save_system(const SystemGraph& g, const std::string& path);

/// Solved-table dump. Round-trip preserves lookup results bit-exactly.
std::string serialize_solved(const SolvedSystem& s);
SolvedSystem parse_solved(const std::string& text);

SolvedSystem load_solved(const std::string& path);
void save_solved(const SolvedSystem& s, const std::string& path);

/// Delimiter-separated dataset with a header row of dimension names and
/// optional '#' comment lines. Rows with non-finite values are dropped and
/// counted.
Dataset parse_dataset(const std::string& text, const std::string& provenance);
std::string serialize_dataset(const Dataset& data);

Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& data, const std::string& path);

/// Shortest round-trip decimal form of a double (used by every writer).
std::string format_double(double value);

} // namespace opttopo

#endif
