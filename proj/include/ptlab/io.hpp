#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ptlab/grid.hpp"
#include "ptlab/limit.hpp"
#include "ptlab/noise.hpp"
#include "ptlab/spde.hpp"

namespace ptlab {

// Shortest decimal that reparses to the same double (%.17g); every CSV
// number goes through this so re-runs can be compared byte for byte.
std::string fmt_g17(double x);

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);

    void row(const std::vector<std::string>& cells);
    void row_values(const std::vector<double>& values);
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
    std::size_t ncols_;
};

// Coefficient dump: one JSON header line (field name, n, time, layout
// "row-major over k") followed by the raw re/im pairs in native doubles.
void write_snapshot(const std::string& path, const ScalarField& f, double time,
                    const std::string& name);
ScalarField read_snapshot(const std::string& path, double* time = nullptr,
                          std::string* name = nullptr);

nlohmann::json load_json(const std::string& path);
void save_json(const std::string& path, const nlohmann::json& j);

// FNV-1a over the canonical (sorted-key) dump; the manifest's plan digest.
std::uint64_t json_digest(const nlohmann::json& j);

void to_json(nlohmann::json& j, const GammaRule& r);
void from_json(const nlohmann::json& j, GammaRule& r);
void to_json(nlohmann::json& j, const NoiseSpec& s);
void from_json(const nlohmann::json& j, NoiseSpec& s);
void to_json(nlohmann::json& j, const SolverConfig& c);
void from_json(const nlohmann::json& j, SolverConfig& c);
void to_json(nlohmann::json& j, const LimitConfig& c);
void from_json(const nlohmann::json& j, LimitConfig& c);
void to_json(nlohmann::json& j, const Mat2& m);
void from_json(const nlohmann::json& j, Mat2& m);
void to_json(nlohmann::json& j, const LimitParams& p);
void from_json(const nlohmann::json& j, LimitParams& p);

}  // namespace ptlab
