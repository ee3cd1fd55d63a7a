#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "rephase/atlas.hpp"
#include "rephase/error.hpp"

namespace rephase::atlas {

namespace {

const std::vector<std::string> kColumns = {"dL",    "eta",    "l0_times_dL", "l1",
                                           "J_norm", "n_arcs", "converged",   "epsilon"};

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& column, long line) {
    if (s.empty()) throw ParseError("empty value in column '" + column + "'", line);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) {
        throw ParseError("bad number '" + s + "' in column '" + column + "'", line);
    }
    return v;
}

long parse_int(const std::string& s, const std::string& column, long line) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw ParseError("bad integer '" + s + "' in column '" + column + "'", line);
    }
    return v;
}

void write_sidecar(const AtlasGrid& grid, const std::string& path) {
    nlohmann::ordered_json j;
    j["schema_version"] = grid.meta.schema_version;
    j["kind"] = "fuel";
    j["epsilon"] = grid.meta.epsilon;
    j["generator_version"] = grid.meta.generator_version;
    j["rng_seed"] = grid.meta.rng_seed;
    j["seed_policy"] = grid.meta.seed_policy;
    j["grid"] = {{"dL_count", grid.dL_axis.size()},
                 {"dL_first", grid.dL_axis.front()},
                 {"dL_last", grid.dL_axis.back()},
                 {"eta_count", grid.eta_axis.size()},
                 {"eta_first", grid.eta_axis.front()},
                 {"eta_last", grid.eta_axis.back()}};
    j["columns"] = kColumns;
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    os << j.dump(2) << "\n";
}

}  // namespace

void write_time_curve(const std::vector<TimeCurvePoint>& curve, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    os << "dL,l1,chi,converged\n";
    for (const auto& p : curve) {
        os << fmt17(p.delta_L) << ',' << fmt17(p.l1) << ',' << fmt17(p.chi) << ','
           << (p.converged ? 1 : 0) << '\n';
    }
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "time";
    j["generator_version"] = REPHASE_VERSION;
    j["points"] = curve.size();
    j["columns"] = {"dL", "l1", "chi", "converged"};
    std::ofstream meta(path + ".json");
    if (!meta) throw Error("cannot write " + path + ".json");
    meta << j.dump(2) << "\n";
}

void write_atlas(const AtlasGrid& grid, const std::string& path) {
    if (grid.dL_axis.empty() || grid.eta_axis.empty() ||
        grid.cells.size() != grid.dL_axis.size() * grid.eta_axis.size()) {
        throw DomainError("atlas grid shape does not match its axes");
    }
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    for (std::size_t k = 0; k < kColumns.size(); ++k) os << (k ? "," : "") << kColumns[k];
    os << '\n';
    for (std::size_t i = 0; i < grid.dL_axis.size(); ++i) {
        for (std::size_t j = 0; j < grid.eta_axis.size(); ++j) {
            const AtlasCell& c = grid.cell(i, j);
            os << fmt17(grid.dL_axis[i]) << ',' << fmt17(grid.eta_axis[j]) << ','
               << fmt17(c.l0_times_dL) << ',' << fmt17(c.l1) << ',' << fmt17(c.J_norm) << ','
               << c.n_arcs << ',' << (c.converged ? 1 : 0) << ',' << fmt17(c.epsilon) << '\n';
        }
    }
    write_sidecar(grid, path + ".json");
}

AtlasGrid read_atlas(const std::string& path) {
    AtlasGrid grid;

    std::ifstream meta_in(path + ".json");
    if (!meta_in) throw ParseError("missing metadata sidecar " + path + ".json", 0);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(meta_in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ".json: " + e.what(), 0);
    }
    if (!meta.contains("schema_version") || !meta["schema_version"].is_number_integer()) {
        throw ParseError(path + ".json: schema_version missing", 0);
    }
    grid.meta.schema_version = meta["schema_version"].get<int>();
    if (grid.meta.schema_version != AtlasMeta{}.schema_version) {
        throw ParseError(path + ".json: unsupported schema version " +
                             std::to_string(grid.meta.schema_version),
                         0);
    }
    if (meta.value("kind", std::string("fuel")) != "fuel") {
        throw ParseError(path + ".json: not a fuel atlas", 0);
    }
    grid.meta.epsilon = meta.value("epsilon", 0.0);
    grid.meta.generator_version = meta.value("generator_version", std::string());
    grid.meta.rng_seed = meta.value("rng_seed", std::uint64_t{0});
    grid.meta.seed_policy = meta.value("seed_policy", std::string());

    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path, 0);
    std::string line;
    long lineno = 1;
    if (!std::getline(in, line)) throw ParseError("empty atlas file", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line);
    std::map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (std::find(kColumns.begin(), kColumns.end(), header[k]) == kColumns.end()) {
            throw ParseError("unknown column '" + header[k] + "'", lineno);
        }
        if (!index.emplace(header[k], k).second) {
            throw ParseError("duplicate column '" + header[k] + "'", lineno);
        }
    }
    for (const auto& c : kColumns) {
        if (!index.count(c)) throw ParseError("missing column '" + c + "'", lineno);
    }

    struct Row {
        double dL, eta;
        AtlasCell cell;
        long line;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(f.size()),
                             lineno);
        }
        auto num = [&](const std::string& c) { return parse_double(f[index[c]], c, lineno); };
        Row r{num("dL"), num("eta"), {}, lineno};
        r.cell.l0_times_dL = num("l0_times_dL");
        r.cell.l1 = num("l1");
        r.cell.J_norm = num("J_norm");
        r.cell.n_arcs = static_cast<int>(parse_int(f[index["n_arcs"]], "n_arcs", lineno));
        const long conv = parse_int(f[index["converged"]], "converged", lineno);
        if (conv != 0 && conv != 1) throw ParseError("converged must be 0 or 1", lineno);
        r.cell.converged = conv == 1;
        r.cell.epsilon = num("epsilon");
        rows.push_back(r);
    }
    if (rows.empty()) throw ParseError("atlas has no rows", lineno);

    for (const auto& r : rows) {
        grid.dL_axis.push_back(r.dL);
        grid.eta_axis.push_back(r.eta);
    }
    for (auto* axis : {&grid.dL_axis, &grid.eta_axis}) {
        std::sort(axis->begin(), axis->end());
        axis->erase(std::unique(axis->begin(), axis->end()), axis->end());
    }
    const std::size_t ni = grid.dL_axis.size(), nj = grid.eta_axis.size();
    if (rows.size() != ni * nj) {
        throw ParseError("rows do not form a complete dL x eta grid", lineno);
    }
    if (meta.contains("grid")) {
        const auto& g = meta["grid"];
        if (g.value("dL_count", ni) != ni || g.value("eta_count", nj) != nj) {
            throw ParseError(path + ".json: grid size disagrees with the CSV body", 0);
        }
    }
    grid.cells.resize(ni * nj);
    std::vector<bool> seen(ni * nj, false);
    for (const auto& r : rows) {
        const auto i = static_cast<std::size_t>(
            std::lower_bound(grid.dL_axis.begin(), grid.dL_axis.end(), r.dL) -
            grid.dL_axis.begin());
        const auto j = static_cast<std::size_t>(
            std::lower_bound(grid.eta_axis.begin(), grid.eta_axis.end(), r.eta) -
            grid.eta_axis.begin());
        if (seen[i * nj + j]) throw ParseError("duplicate grid point", r.line);
        seen[i * nj + j] = true;
        grid.cell(i, j) = r.cell;
    }
    return grid;
}

}  // namespace rephase::atlas
