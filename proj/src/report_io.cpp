#include "symbreak/report_io.hpp"

#include <cstdio>
#include <fstream>

#include "symbreak/errors.hpp"

namespace symbreak {

using nlohmann::json;

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

json to_json(const ReducedPoint& pt) {
    return json{{"p", pt.desc.p},
                {"m", pt.desc.m},
                {"d", pt.desc.d},
                {"N", pt.desc.N()},
                {"xi", pt.xi}};
}

json to_json(const SpectrumReport& rep) {
    json groups = json::array();
    for (const auto& g : rep.groups) {
        json eigs = json::array();
        for (double v : g.eigenvalues) eigs.push_back(json{{"value", v}, {"multiplicity", g.degree}});
        groups.push_back(json{{"irrep", g.irrep}, {"eigenvalues", eigs}});
    }
    return json{{"descriptor",
                 {{"p", rep.desc.p}, {"m", rep.desc.m}, {"d", rep.desc.d}}},
                {"method", rep.method},
                {"groups", groups},
                {"notes", rep.notes}};
}

json to_json(const FPSExpansion& exp) {
    json coeffs = json::array();
    for (std::size_t i = 0; i < exp.coeffs.size(); ++i)
        for (int j = 0; j <= exp.order; ++j) {
            const double c = exp.coeff(static_cast<int>(i), j);
            if (c != 0.0)
                coeffs.push_back(json{{"coordinate", i + 1}, {"order", j}, {"value", c}});
        }
    return json{{"family", exp.family.name()},
                {"kappa", exp.kappa},
                {"order", exp.order},
                {"coefficients", coeffs},
                {"reduced_order", exp.reduced_order}};
}

json to_json(const ContinuationPath& path) {
    json samples = json::array();
    for (const auto& s : path.samples)
        samples.push_back(json{{"d", s.d},
                               {"xi", s.xi},
                               {"min_abs_jac_eig", s.min_abs_jac_eig},
                               {"newton_iterations", s.newton_iterations}});
    return json{{"family", path.family.name()},
                {"complete", path.complete},
                {"last_good_d", path.last_good_d},
                {"termination", path.termination},
                {"samples", samples}};
}

json to_json(const GlobalMinComplexReport& rep) {
    json verts = json::array();
    for (const auto& v : rep.vertices) {
        json flat = json::array();
        for (std::size_t i = 0; i < v.raw().size(); ++i) flat.push_back(v.raw()[i]);
        verts.push_back(flat);
    }
    json edges = json::array();
    for (const auto& e : rep.edges) edges.push_back(json::array({e.first, e.second}));
    return json{{"vertex_count", rep.vertex_count},
                {"edge_count", rep.edge_count},
                {"connected", rep.connected},
                {"is_cycle", rep.is_cycle},
                {"max_sampled_loss", rep.max_sampled_loss},
                {"vertices", verts},
                {"edges", edges}};
}

std::string path_to_csv(const ContinuationPath& path) {
    std::string out = "d";
    const std::size_t n = path.samples.empty() ? 0 : path.samples.front().xi.size();
    for (std::size_t i = 0; i < n; ++i) out += ",xi" + std::to_string(i + 1);
    out += ",min_abs_jac_eig,newton_iterations\n";
    for (const auto& s : path.samples) {
        out += fmt(s.d);
        for (double v : s.xi) out += "," + fmt(v);
        out += "," + fmt(s.min_abs_jac_eig) + "," + std::to_string(s.newton_iterations) + "\n";
    }
    return out;
}

std::string table_to_csv(const std::vector<TableRow>& rows) {
    std::string out = "irrep,branch,kind,constant,slope,fit_rms\n";
    for (const auto& r : rows) {
        out += r.irrep + "," + std::to_string(r.branch) + "," +
               (r.linear ? "linear" : "constant") + "," + fmt(r.constant) + "," +
               fmt(r.slope) + "," + fmt(r.fit_rms) + "\n";
    }
    return out;
}

std::string spectrum_to_csv(const SpectrumReport& rep) {
    std::string out = "irrep,eigenvalue,multiplicity\n";
    for (const auto& g : rep.groups)
        for (double v : g.eigenvalues)
            out += g.irrep + "," + fmt(v) + "," + std::to_string(g.degree) + "\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw domain_error("cannot open output file: " + path);
    f << content;
}

}  // namespace symbreak
