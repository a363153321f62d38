#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "conjlab/flows.hpp"

namespace conjlab {

/// Round-trippable decimal text for a double ("inf", "-inf", "nan" spelled out).
std::string fmt(double v);

/// Writes j with sorted keys and two-space indentation, creating parent directories.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(std::vector<std::string> row);
    void add_row(const std::vector<double>& row);
    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Columns t, x_0 .. x_{m-1}, y_0 .. y_{n-1}.
CsvTable trajectory_table(const Trajectory& tr);

/// Trajectory plus metadata: system hash, solver tolerances, iteration counts.
nlohmann::json trajectory_bundle(const Trajectory& tr, const SemilinearSystem& sys,
                                 const SolverOptions& opt);

}  // namespace conjlab
