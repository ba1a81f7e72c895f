#include "dreg/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dreg/errors.hpp"

namespace dreg {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return in;
}

std::vector<std::string> split_tokens(std::string_view line, bool allow_commas) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        const bool sep = ch == ' ' || ch == '\t' || ch == '\r' || (allow_commas && ch == ',');
        if (sep) {
            if (!cur.empty()) {
                out.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) {
        out.push_back(std::move(cur));
    }
    return out;
}

bool parse_real(const std::string& token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;  // names; list properties recorded as ""
};

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<Vec3> parse_ply(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) {
            return false;
        }
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        return true;
    };

    if (!next_line() || line != "ply") {
        throw ParseError("missing 'ply' magic", lineno == 0 ? 1 : lineno);
    }
    std::vector<PlyElement> elements;
    bool have_format = false;
    for (;;) {
        if (!next_line()) {
            throw ParseError("unterminated header", lineno + 1);
        }
        const auto tok = split_tokens(line, false);
        if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") {
            continue;
        }
        if (tok[0] == "end_header") {
            break;
        }
        if (tok[0] == "format") {
            if (tok.size() < 2) {
                throw ParseError("malformed format line", lineno);
            }
            if (tok[1] != "ascii") {
                throw UnsupportedFormat("PLY encoding '" + tok[1] + "' is not supported (ASCII only)");
            }
            have_format = true;
        } else if (tok[0] == "element") {
            PlyElement e;
            if (tok.size() != 3 || !std::isdigit(static_cast<unsigned char>(tok[2][0]))) {
                throw ParseError("malformed element line", lineno);
            }
            e.name = tok[1];
            e.count = std::stoull(tok[2]);
            elements.push_back(std::move(e));
        } else if (tok[0] == "property") {
            if (elements.empty()) {
                throw ParseError("property before any element", lineno);
            }
            if (tok.size() >= 2 && tok[1] == "list") {
                if (tok.size() != 5) {
                    throw ParseError("malformed list property", lineno);
                }
                elements.back().properties.emplace_back();
            } else {
                if (tok.size() != 3) {
                    throw ParseError("malformed property line", lineno);
                }
                elements.back().properties.push_back(tok[2]);
            }
        } else {
            throw ParseError("unknown header keyword '" + tok[0] + "'", lineno);
        }
    }
    if (!have_format) {
        throw ParseError("header has no format line", lineno);
    }

    std::vector<Vec3> points;
    bool found_vertex = false;
    for (const auto& e : elements) {
        if (e.name != "vertex" || found_vertex) {
            // One line per instance in ASCII PLY, list properties included.
            for (std::size_t i = 0; i < e.count; ++i) {
                if (!next_line()) {
                    throw ParseError("unexpected end of file in element '" + e.name + "'", lineno + 1);
                }
            }
            continue;
        }
        found_vertex = true;
        int ix = -1;
        int iy = -1;
        int iz = -1;
        for (std::size_t p = 0; p < e.properties.size(); ++p) {
            const auto& name = e.properties[p];
            if (name.empty()) {
                throw ParseError("list property inside vertex element is not supported", lineno);
            }
            if (name == "x") ix = static_cast<int>(p);
            if (name == "y") iy = static_cast<int>(p);
            if (name == "z") iz = static_cast<int>(p);
        }
        if (ix < 0 || iy < 0 || iz < 0) {
            throw ParseError("vertex element lacks x, y, z properties", lineno);
        }
        points.reserve(e.count);
        for (std::size_t i = 0; i < e.count; ++i) {
            if (!next_line()) {
                throw ParseError("unexpected end of file in vertex data", lineno + 1);
            }
            const auto tok = split_tokens(line, false);
            if (tok.size() != e.properties.size()) {
                throw ParseError("expected " + std::to_string(e.properties.size()) + " values, got " +
                                     std::to_string(tok.size()),
                                 lineno);
            }
            Vec3 p;
            const int idx[3] = {ix, iy, iz};
            for (int k = 0; k < 3; ++k) {
                if (!parse_real(tok[static_cast<std::size_t>(idx[k])], p[k]) || !std::isfinite(p[k])) {
                    throw ParseError("invalid coordinate '" + tok[static_cast<std::size_t>(idx[k])] + "'", lineno);
                }
            }
            points.push_back(p);
        }
    }
    if (!found_vertex) {
        throw ParseError("no vertex element", lineno);
    }
    return points;
}

std::vector<Vec3> parse_ply(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_ply(in);
}

CorrespondenceSet read_correspondences(std::istream& in) {
    CorrespondenceSet out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = split_tokens(line, true);
        if (tok.empty() || tok[0].front() == '#') {
            continue;
        }
        if (tok.size() != 6) {
            throw ParseError("expected 6 values, got " + std::to_string(tok.size()), lineno);
        }
        double v[6];
        for (std::size_t k = 0; k < 6; ++k) {
            if (!parse_real(tok[k], v[k]) || !std::isfinite(v[k])) {
                throw ParseError("invalid number '" + tok[k] + "'", lineno);
            }
        }
        out.push_back({out.size(), Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])});
    }
    return out;
}

CorrespondenceSet read_correspondences(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_correspondences(in);
}

void write_correspondences(std::ostream& os, std::span<const Correspondence> set) {
    os << "# x1 x2 x3 y1 y2 y3\n";
    for (const auto& c : set) {
        os << format_double(c.x.x()) << ' ' << format_double(c.x.y()) << ' ' << format_double(c.x.z()) << ' '
           << format_double(c.y.x()) << ' ' << format_double(c.y.y()) << ' ' << format_double(c.y.z()) << '\n';
    }
}

nlohmann::json result_to_json(const SolverResult& result, std::string_view solver) {
    const auto rot = result.transform.rot.vec();
    std::vector<std::size_t> one_based;
    one_based.reserve(result.inliers.size());
    for (std::size_t i : result.inliers) {
        one_based.push_back(i + 1);
    }
    return {{"schema", kResultSchema},
            {"solver", solver},
            {"rotation", rot},
            {"translation", {result.transform.tra.x(), result.transform.tra.y(), result.transform.tra.z()}},
            {"inliers", one_based},
            {"stats",
             {{"iterations_layer1", result.iterations_layer1},
              {"total_layer2_samples", result.total_layer2_samples},
              {"compat_checks", result.compat_checks},
              {"consensus_builds", result.consensus_builds},
              {"elapsed_s", result.elapsed}}}};
}

SolverResult result_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != kResultSchema) {
            throw ParseError("unsupported result schema", 0);
        }
        const auto rot = j.at("rotation").get<std::vector<double>>();
        const auto tra = j.at("translation").get<std::vector<double>>();
        if (rot.size() != 9 || tra.size() != 3) {
            throw ParseError("rotation needs 9 values and translation 3", 0);
        }
        Mat3 m;
        for (int c = 0; c < 3; ++c) {
            for (int r = 0; r < 3; ++r) {
                m(r, c) = rot[static_cast<std::size_t>(3 * c + r)];
            }
        }
        SolverResult out;
        out.transform = {Rotation::from_matrix(m), Vec3(tra[0], tra[1], tra[2])};
        for (std::size_t i : j.at("inliers").get<std::vector<std::size_t>>()) {
            if (i == 0) {
                throw ParseError("inlier indices are 1-based", 0);
            }
            out.inliers.push_back(i - 1);
        }
        const auto& s = j.at("stats");
        out.iterations_layer1 = s.at("iterations_layer1").get<std::size_t>();
        out.total_layer2_samples = s.at("total_layer2_samples").get<std::size_t>();
        out.compat_checks = s.at("compat_checks").get<std::size_t>();
        out.consensus_builds = s.at("consensus_builds").get<std::size_t>();
        out.elapsed = s.at("elapsed_s").get<double>();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed result JSON: ") + e.what(), 0);
    }
}

}  // namespace dreg
