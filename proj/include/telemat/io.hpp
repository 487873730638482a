#pragma once

// State and basis documents.
//
// A state document:
//
//   {
//     "version": 1,
//     "particles": [{"label": "1", "dim": 2}, {"label": "2", "dim": 2}],
//     "amplitudes": [{"index": "00", "re": 0.7071067811865476, "im": 0},
//                    {"index": "11", "re": 0.7071067811865476, "im": 0}],
//     "normalized": true
//   }
//
// Index strings hold one character per particle ('0'-'9', then 'a'-'z' for
// digits 10-35) or comma-separated decimal digits. Unlisted amplitudes are 0.
// A basis document is {"version": 1, "states": [<state document>, ...]};
// list order defines the outcome ids.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "telemat/coeffmat.hpp"
#include "telemat/qstate.hpp"

namespace telemat::io {

inline constexpr int kFormatVersion = 1;

std::vector<Index> parse_digits(const QuditDims& dims, const std::string& index);
std::string format_digits(const QuditDims& dims, Index flat);

PureState<double> state_from_json(const nlohmann::json& doc, const std::string& where = "state");
nlohmann::json state_to_json(const PureState<double>& state);

PureState<double> parse_state(std::istream& in, const std::string& source = "<stream>");
PureState<double> parse_state_file(const std::filesystem::path& path);
void write_state(std::ostream& out, const PureState<double>& state);

std::vector<PureState<double>> parse_basis(std::istream& in, const std::string& source = "<stream>");
std::vector<PureState<double>> parse_basis_file(const std::filesystem::path& path);
nlohmann::json basis_to_json(const std::vector<PureState<double>>& states);

/// Resolves comma-separated particle labels (Bob list first) into slots.
Bipartition parse_partition(const QuditDims& dims, const std::string& bob, const std::string& alice);

}  // namespace telemat::io
