#include "ptlab/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace ptlab {

std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary), ncols_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out_ << ',';
        out_ << columns[i];
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != ncols_) {
        throw std::invalid_argument("csv row width " + std::to_string(cells.size()) +
                                    " != header width " + std::to_string(ncols_));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void CsvWriter::row_values(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(fmt_g17(v));
    row(cells);
}

void write_snapshot(const std::string& path, const ScalarField& f, double time,
                    const std::string& name) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    nlohmann::json h = {{"field", name},
                        {"layout", "row-major over k"},
                        {"n", f.n},
                        {"time", time}};
    out << h.dump() << '\n';
    out.write(reinterpret_cast<const char*>(f.c.data()),
              std::streamsize(f.c.size() * sizeof(cplx)));
    if (!out) throw std::runtime_error("short write to " + path);
}

ScalarField read_snapshot(const std::string& path, double* time, std::string* name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string header;
    std::getline(in, header);
    const nlohmann::json h = nlohmann::json::parse(header);
    ScalarField f(h.at("n").get<int>());
    if (time) *time = h.at("time").get<double>();
    if (name) *name = h.at("field").get<std::string>();
    in.read(reinterpret_cast<char*>(f.c.data()), std::streamsize(f.c.size() * sizeof(cplx)));
    if (in.gcount() != std::streamsize(f.c.size() * sizeof(cplx))) {
        throw std::runtime_error("truncated snapshot " + path);
    }
    return f;
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

void save_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

std::uint64_t json_digest(const nlohmann::json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void to_json(nlohmann::json& j, const GammaRule& r) {
    j = {{"kind", r.kind == GammaRule::Kind::proportional ? "proportional" : "subordinate"},
         {"q0", r.q0},
         {"p", r.p}};
}

void from_json(const nlohmann::json& j, GammaRule& r) {
    const std::string kind = j.value("kind", "proportional");
    if (kind == "proportional") {
        r.kind = GammaRule::Kind::proportional;
    } else if (kind == "subordinate") {
        r.kind = GammaRule::Kind::subordinate;
    } else {
        throw std::invalid_argument("unknown gamma rule kind: " + kind);
    }
    r.q0 = j.value("q0", 1.0);
    r.p = j.value("p", 0.5);
}

void to_json(nlohmann::json& j, const NoiseSpec& s) {
    j = {{"ell", s.ell},
         {"kappa", s.kappa},
         {"rule", s.rule},
         {"r_theta", s.r_theta},
         {"r_chi", s.r_chi}};
}

void from_json(const nlohmann::json& j, NoiseSpec& s) {
    s.ell = j.value("ell", 1.0);
    s.kappa = j.value("kappa", 0.25);
    if (j.contains("rule")) s.rule = j.at("rule").get<GammaRule>();
    s.r_theta = j.value("r_theta", 0.35);
    s.r_chi = j.value("r_chi", 0.35);
}

void to_json(nlohmann::json& j, const SolverConfig& c) {
    j = {{"nu", c.nu},
         {"dt", c.dt},
         {"t_end", c.t_end},
         {"n", c.n},
         {"seed", c.seed},
         {"record_every", c.record_every},
         {"fourth_moment_cap", c.fourth_moment_cap}};
}

void from_json(const nlohmann::json& j, SolverConfig& c) {
    c.nu = j.value("nu", 0.05);
    c.dt = j.value("dt", 1e-3);
    c.t_end = j.value("t_end", 1.0);
    c.n = j.value("n", 64);
    c.seed = j.value("seed", std::uint64_t{1});
    c.record_every = j.value("record_every", 1);
    c.fourth_moment_cap = j.value("fourth_moment_cap", 0.0);
}

void to_json(nlohmann::json& j, const LimitConfig& c) {
    j = {{"dt", c.dt}, {"t_end", c.t_end}, {"n", c.n}, {"record_every", c.record_every}};
}

void from_json(const nlohmann::json& j, LimitConfig& c) {
    c.dt = j.value("dt", 1e-3);
    c.t_end = j.value("t_end", 1.0);
    c.n = j.value("n", 64);
    c.record_every = j.value("record_every", 1);
}

void to_json(nlohmann::json& j, const Mat2& m) {
    j = {{m.a[0][0], m.a[0][1]}, {m.a[1][0], m.a[1][1]}};
}

void from_json(const nlohmann::json& j, Mat2& m) {
    for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 2; ++k) m.a[i][k] = j.at(i).at(k).get<double>();
    }
}

void to_json(nlohmann::json& j, const LimitParams& p) {
    j = {{"nu", p.nu}, {"qbar", p.qbar}, {"a", p.a}};
}

void from_json(const nlohmann::json& j, LimitParams& p) {
    p.nu = j.value("nu", 0.05);
    if (j.contains("qbar")) p.qbar = j.at("qbar").get<Mat2>();
    if (j.contains("a")) p.a = j.at("a").get<Mat2>();
}

}  // namespace ptlab
