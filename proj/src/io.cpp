#include "conjlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "conjlab/errors.hpp"

namespace conjlab {

namespace fs = std::filesystem;

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError("cannot parse " + path.string() + ": " + e.what());
    }
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw InputError("CsvTable: empty header");
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw InputError("CsvTable: row width does not match the header");
    rows_.push_back(std::move(row));
}

void CsvTable::add_row(const std::vector<double>& row) {
    std::vector<std::string> r;
    r.reserve(row.size());
    for (double v : row) r.push_back(fmt(v));
    add_row(std::move(r));
}

std::string CsvTable::str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return os.str();
}

void CsvTable::write(const fs::path& path) const {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << str();
}

CsvTable trajectory_table(const Trajectory& tr) {
    std::vector<std::string> header{"t"};
    const std::size_t nx = tr.size() ? tr.x_states()[0].size() : 0;
    const std::size_t ny = tr.size() ? tr.y_states()[0].size() : 0;
    for (std::size_t i = 0; i < nx; ++i) header.push_back("x_" + std::to_string(i));
    for (std::size_t j = 0; j < ny; ++j) header.push_back("y_" + std::to_string(j));
    CsvTable t(header);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        std::vector<double> row{tr.times()[k]};
        row.insert(row.end(), tr.x_states()[k].begin(), tr.x_states()[k].end());
        row.insert(row.end(), tr.y_states()[k].begin(), tr.y_states()[k].end());
        t.add_row(row);
    }
    return t;
}

nlohmann::json trajectory_bundle(const Trajectory& tr, const SemilinearSystem& sys, const SolverOptions& opt) {
    return {{"system", sys.name()},
            {"system_hash", sys.hash()},
            {"tolerances",
             {{"max_step", opt.max_step}, {"picard_tol", opt.picard_tol}, {"local_tol", opt.local_tol},
              {"max_iter", opt.max_iter}}},
            {"picard_iterations", tr.picard_iterations},
            {"last_residual", tr.last_residual},
            {"times", tr.times()},
            {"x", tr.x_states()},
            {"y", tr.y_states()}};
}

}  // namespace conjlab
