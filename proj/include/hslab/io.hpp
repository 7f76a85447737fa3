#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hslab/energy.hpp"
#include "hslab/grid.hpp"
#include "hslab/profile.hpp"

namespace hslab {

using ordered_json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Two-column `r value` rows, one per node, with #-comments.
inline void write_profile(const std::string& path, const RadialGrid& g,
                          const RadialProfile& u, const std::string& comment = "") {
    std::ofstream f(path);
    if (!f) throw IoError("write_profile: cannot open " + path);
    if (!comment.empty()) f << "# " << comment << "\n";
    f << "# columns: r value\n";
    for (int i = 0; i < g.size(); ++i)
        f << format_full(g.nodes[i]) << " " << format_full(u.values[i]) << "\n";
    if (!f) throw IoError("write_profile: write failed for " + path);
}

/// Reads the two-column format. Radii matching the grid nodes adopt the
/// values directly; otherwise the samples are resampled onto the grid.
inline RadialProfile read_profile(const std::string& path, const RadialGrid& g) {
    std::ifstream f(path);
    if (!f) throw IoError("read_profile: cannot open " + path);
    std::vector<double> rs, vs;
    std::string line;
    while (std::getline(f, line)) {
        const size_t h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        std::istringstream ss(line);
        double r, v;
        if (ss >> r >> v) {
            rs.push_back(r);
            vs.push_back(v);
        }
    }
    if (rs.empty()) throw IoError("read_profile: no samples in " + path);

    RadialProfile out;
    if (int(rs.size()) == g.size()) {
        bool match = true;
        for (int i = 0; i < g.size(); ++i)
            if (std::abs(rs[i] - g.nodes[i]) > 1e-12 * g.nodes[i]) { match = false; break; }
        if (match) {
            out.values = std::move(vs);
            return out;
        }
    }
    std::vector<double> ts(rs.size());
    for (size_t i = 0; i < rs.size(); ++i) {
        if (!(rs[i] > 0.0)) throw IoError("read_profile: nonpositive radius in " + path);
        ts[i] = std::log(rs[i]);
    }
    PchipInterpolant interp(ts, vs);
    out.values.resize(g.size());
    for (int i = 0; i < g.size(); ++i) out.values[i] = interp(g.log_nodes[i]);
    return out;
}

inline ordered_json grid_to_json(const RadialGrid& g) {
    return ordered_json{
        {"r_min", g.r_min}, {"r_max", g.r_max}, {"m", g.size()}, {"n", g.dim}};
}

inline RadialGrid grid_from_json(const ordered_json& j) {
    return build_log_grid(j.at("r_min").get<double>(), j.at("r_max").get<double>(),
                          j.at("m").get<int>(), j.at("n").get<int>());
}

inline ordered_json energy_to_json(const EnergyBreakdown& b) {
    return ordered_json{{"grad_term", b.grad_term},
                        {"hardy_term", b.hardy_term},
                        {"triple_norm_p", b.triple_norm_p},
                        {"sobolev_mass", b.sobolev_mass},
                        {"hs_mass", b.hs_mass},
                        {"phi", b.phi}};
}

inline ordered_json params_to_json(const ProblemParams& pp) {
    ordered_json j{{"n", pp.n}, {"p", pp.p}, {"s", pp.s}, {"mu", pp.mu}};
    if (pp.q) j["q"] = *pp.q;
    j["p_star"] = pp.p_star;
    j["p_star_s"] = pp.p_star_s;
    j["mu1"] = pp.mu1;
    return j;
}

/// Plain CSV with a header row; cells rendered at full precision.
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::ofstream f(path);
    if (!f) throw IoError("write_csv: cannot open " + path);
    for (size_t i = 0; i < header.size(); ++i)
        f << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (size_t i = 0; i < row.size(); ++i)
            f << row[i] << (i + 1 < row.size() ? "," : "\n");
    if (!f) throw IoError("write_csv: write failed for " + path);
}

}  // namespace hslab
