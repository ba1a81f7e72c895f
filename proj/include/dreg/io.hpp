#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dreg/result.hpp"
#include "dreg/solvers.hpp"

namespace dreg {

/// Shortest-exact decimal form: 17 significant digits, "nan"/"inf" for non-finite.
std::string format_double(double v);

/// Vertex positions of an ASCII PLY file. Properties other than x, y, z and
/// elements other than `vertex` are skipped. Binary encodings throw
/// UnsupportedFormat; malformed content throws ParseError.
std::vector<Vec3> parse_ply(std::istream& in);
std::vector<Vec3> parse_ply(const std::filesystem::path& path);

/// Six reals per row (x1 x2 x3 y1 y2 y3), separated by whitespace and/or
/// commas. Lines starting with '#' and blank lines are skipped. Row order
/// assigns indices 0..N-1.
CorrespondenceSet read_correspondences(std::istream& in);
CorrespondenceSet read_correspondences(const std::filesystem::path& path);

void write_correspondences(std::ostream& os, std::span<const Correspondence> set);

inline constexpr std::string_view kResultSchema = "daniel-result/1";

/// { schema, solver, rotation (9, column-major), translation (3),
///   inliers (1-based), stats }
nlohmann::json result_to_json(const SolverResult& result, std::string_view solver);
/// Throws ParseError (line 0) on schema violations, NotARotation on a bad rotation block.
SolverResult result_from_json(const nlohmann::json& j);

}  // namespace dreg
