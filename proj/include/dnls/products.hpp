#pragma once

// File emission for runner products. Every float goes through format_real
// so repeated runs give byte-identical CSV bodies.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dnls/analysis.hpp"
#include "dnls/lattice.hpp"
#include "dnls/proximity.hpp"
#include "dnls/timestep.hpp"

namespace dnls::runner {

/// %.17g; NaN prints as "nan".
std::string format_real(double x);

/// Writes one CSV file: a header line, then rows. Throws IOError.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<const char*> columns);

    void row(std::initializer_list<double> values);
    /// (t, integer index, value) rows, e.g. spectrum frames.
    void row_with_index(double t, long long index, double value);

    std::size_t rows() const noexcept { return rows_; }
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
    std::size_t rows_ = 0;
};

/// Sample indices whose times lie on the emit grid t0 + j * every (all when
/// every is 0).
std::vector<std::size_t> emit_indices(const std::vector<double>& times, double every);

/// States as physical fields: shifted trajectories are mapped back through
/// u = (U + A) exp(i A^2 t); others are returned unchanged.
std::vector<ComplexState> physical_states(const Trajectory& traj);

std::size_t write_densities(const std::filesystem::path& path, const std::vector<double>& times,
                            const std::vector<ComplexState>& states, const NodeGrid& grid,
                            const std::vector<std::size_t>& rows);
std::size_t write_spectrum(const std::filesystem::path& path, const std::vector<double>& times,
                           const std::vector<ComplexState>& states, double h,
                           const std::vector<std::size_t>& rows);
std::size_t write_phase_plane(const std::filesystem::path& path, const std::vector<double>& times,
                              const std::vector<ComplexState>& states, int central);
std::size_t write_mi_scan(const std::filesystem::path& path, const std::vector<MIScan>& scans);
std::size_t write_proximity(const std::filesystem::path& path, const ProximityReport& report);
std::size_t write_wedge(const std::filesystem::path& path, const std::vector<double>& times,
                        double A, const std::vector<std::size_t>& rows);
std::size_t write_power(const std::filesystem::path& path, const Trajectory& traj,
                        const PowerBoundResult& bound);

/// Central-node density of the run next to the dPS reference.
std::size_t write_central(const std::filesystem::path& path, const std::vector<double>& times,
                          const std::vector<ComplexState>& states, int central, const NodeGrid& grid,
                          const DpsParams& dps);
/// Profile of the sample nearest to dps.t0 against the dPS at t0.
std::size_t write_dps_profile(const std::filesystem::path& path, const std::vector<double>& times,
                              const std::vector<ComplexState>& states, const NodeGrid& grid,
                              const DpsParams& dps);

/// Plain-text gnuplot script rendering one CSV.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string plot_script(const std::string& product, const std::string& csv_name,
                        const std::string& title);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace dnls::runner
