#include "dnls/products.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace dnls::runner {

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<const char*> columns)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(columns.size()) {
    if (!out_) throw IOError("cannot open '" + path.string() + "' for writing");
    bool first = true;
    for (const char* c : columns) {
        if (!first) out_ << ',';
        out_ << c;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
    if (values.size() != columns_) throw LengthMismatch("CSV row width does not match header");
    bool first = true;
    for (double v : values) {
        if (!first) out_ << ',';
        out_ << format_real(v);
        first = false;
    }
    out_ << '\n';
    ++rows_;
}

void CsvWriter::row_with_index(double t, long long index, double value) {
    if (columns_ != 3) throw LengthMismatch("CSV row width does not match header");
    out_ << format_real(t) << ',' << index << ',' << format_real(value) << '\n';
    ++rows_;
}

void CsvWriter::close() {
    out_.flush();
    if (!out_) throw IOError("write to '" + path_.string() + "' failed");
    out_.close();
}

std::vector<std::size_t> emit_indices(const std::vector<double>& times, double every) {
    std::vector<std::size_t> rows;
    if (times.empty()) return rows;
    if (every <= 0.0) {
        rows.resize(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) rows[i] = i;
        return rows;
    }
    const double t0 = times.front();
    double next = t0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        // Half a sampling step of slack absorbs rounding in the sample grid.
        const double slack = i + 1 < times.size() ? 0.5 * (times[i + 1] - times[i]) : 0.0;
        if (times[i] + slack >= next || i + 1 == times.size()) {
            if (rows.empty() || rows.back() != i) rows.push_back(i);
            while (next <= times[i] + slack) next += every;
        }
    }
    return rows;
}

std::vector<ComplexState> physical_states(const Trajectory& traj) {
    if (traj.system != System::Shifted) return traj.states;
    std::vector<ComplexState> out;
    out.reserve(traj.states.size());
    for (const auto& U : traj.states) out.push_back(shifted_to_physical(U, traj.background.value()));
    return out;
}

std::size_t write_densities(const std::filesystem::path& path, const std::vector<double>& times,
                            const std::vector<ComplexState>& states, const NodeGrid& grid,
                            const std::vector<std::size_t>& rows) {
    CsvWriter csv(path, {"t", "x", "density"});
    for (auto i : rows) {
        for (std::size_t n = 0; n < grid.size(); ++n) csv.row({times[i], grid.x[n], std::norm(states[i][n])});
    }
    csv.close();
    return csv.rows();
}

std::size_t write_spectrum(const std::filesystem::path& path, const std::vector<double>& times,
                           const std::vector<ComplexState>& states, double h,
                           const std::vector<std::size_t>& rows) {
    CsvWriter csv(path, {"t", "K", "abs_A_K"});
    for (auto i : rows) {
        const auto frame = spectrum(states[i], h);
        for (std::size_t K = 0; K < frame.coeffs.size(); ++K) {
            csv.row_with_index(times[i], static_cast<long long>(K), std::abs(frame.coeffs[K]));
        }
    }
    csv.close();
    return csv.rows();
}

std::size_t write_phase_plane(const std::filesystem::path& path, const std::vector<double>& times,
                              const std::vector<ComplexState>& states, int central) {
    CsvWriter csv(path, {"t", "re_u_c", "im_u_c"});
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto u = states[i][static_cast<std::size_t>(central)];
        csv.row({times[i], u.real(), u.imag()});
    }
    csv.close();
    return csv.rows();
}

std::size_t write_mi_scan(const std::filesystem::path& path, const std::vector<MIScan>& scans) {
    CsvWriter csv(path, {"K", "M", "growth"});
    for (const auto& s : scans) {
        for (std::size_t j = 0; j < s.M.size(); ++j) {
            csv.row({static_cast<double>(s.K), static_cast<double>(s.M[j]), s.growth[j]});
        }
    }
    csv.close();
    return csv.rows();
}

std::size_t write_proximity(const std::filesystem::path& path, const ProximityReport& r) {
    CsvWriter csv(path, {"t", "D_a", "D_a_r", "bound_I", "bound_II"});
    const double nan = std::nan("");
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        csv.row({r.times[i], r.D_a[i], r.D_a_r[i], r.bound_I.empty() ? nan : r.bound_I[i],
                 r.bound_II.empty() ? nan : r.bound_II[i]});
    }
    csv.close();
    return csv.rows();
}

std::size_t write_wedge(const std::filesystem::path& path, const std::vector<double>& times,
                        double A, const std::vector<std::size_t>& rows) {
    CsvWriter csv(path, {"t", "x_minus", "x_plus"});
    const double slope = 4.0 * std::numbers::sqrt2 * A;
    for (auto i : rows) csv.row({times[i], -slope * times[i], slope * times[i]});
    csv.close();
    return csv.rows();
}

std::size_t write_power(const std::filesystem::path& path, const Trajectory& traj,
                        const PowerBoundResult& bound) {
    CsvWriter csv(path, {"t", "P_a", "bound"});
    for (std::size_t i = 0; i < traj.size(); ++i) {
        csv.row({traj.times[i], traj.diagnostics[i].averaged_power, bound.bound[i]});
    }
    csv.close();
    return csv.rows();
}

std::size_t write_central(const std::filesystem::path& path, const std::vector<double>& times,
                          const std::vector<ComplexState>& states, int central, const NodeGrid& grid,
                          const DpsParams& dps) {
    CsvWriter csv(path, {"t", "density_u_c", "density_dps_c"});
    const auto c = static_cast<std::size_t>(central);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto ref = dps_eval(grid, times[i], dps);
        csv.row({times[i], std::norm(states[i][c]), std::norm(ref[c])});
    }
    csv.close();
    return csv.rows();
}

std::size_t write_dps_profile(const std::filesystem::path& path, const std::vector<double>& times,
                              const std::vector<ComplexState>& states, const NodeGrid& grid,
                              const DpsParams& dps) {
    CsvWriter csv(path, {"x", "density_u", "density_dps"});
    if (!times.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (std::abs(times[i] - dps.t0) < std::abs(times[best] - dps.t0)) best = i;
        }
        const auto ref = dps_eval(grid, dps.t0, dps);
        for (std::size_t n = 0; n < grid.size(); ++n) {
            csv.row({grid.x[n], std::norm(states[best][n]), std::norm(ref[n])});
        }
    }
    csv.close();
    return csv.rows();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IOError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IOError("write to '" + path.string() + "' failed");
}

std::string plot_script(const std::string& product, const std::string& csv_name,
                        const std::string& title) {
    std::string s = "# gnuplot script; run from the scenario directory: gnuplot -p " +
                    std::string("plot_") + product + ".txt\n";
    s += "set datafile separator ','\nset key autotitle columnhead\n";
    s += "set title '" + title + "'\n";
    const std::string f = "'" + csv_name + "'";
    if (product.rfind("densities", 0) == 0) {
        s += "set xlabel 'x'\nset ylabel 't'\nset view map\nset pm3d map\n";
        s += "splot " + f + " using 2:1:3 with points pointtype 5 pointsize 0.3 palette notitle";
        s += "\n";
    } else if (product.rfind("spectrum", 0) == 0) {
        s += "set xlabel 'K'\nset ylabel '|A_K|'\nset logscale y\n";
        s += "plot " + f + " using 2:($3 > 0 ? $3 : NaN) with impulses notitle\n";
    } else if (product.rfind("phase_plane", 0) == 0) {
        s += "set size ratio -1\nset xlabel 'Re u_c'\nset ylabel 'Im u_c'\n";
        s += "plot " + f + " using 2:3 with lines notitle\n";
    } else if (product.rfind("mi_scan", 0) == 0) {
        s += "set xlabel 'K'\nset ylabel 'M'\nset view map\n";
        s += "splot " + f + " using 1:2:3 with points pointtype 5 palette notitle\n";
    } else if (product.rfind("proximity", 0) == 0) {
        s += "set xlabel 't'\nset logscale y\n";
        s += "plot " + f + " using 1:2 with lines title 'D_a', " + f +
             " using 1:3 with lines title 'D_a_r'\n";
    } else if (product.rfind("central", 0) == 0) {
        s += "set xlabel 't'\nset ylabel '|u_c|^2'\n";
        s += "plot " + f + " using 1:2 with lines title 'lattice', " + f +
             " using 1:3 with lines dashtype 2 title 'dPS'\n";
    } else if (product.rfind("dps_profile", 0) == 0) {
        s += "set xlabel 'x'\nset ylabel '|u|^2'\nset xrange [-20:20]\n";
        s += "plot " + f + " using 1:2 with linespoints title 'lattice', " + f +
             " using 1:3 with lines dashtype 2 title 'dPS'\n";
    } else if (product.rfind("power", 0) == 0) {
        s += "set xlabel 't'\n";
        s += "plot " + f + " using 1:2 with lines title 'P_a', " + f +
             " using 1:3 with lines dashtype 2 title 'bound'\n";
    } else if (product.rfind("wedge", 0) == 0) {
        s += "set xlabel 'x'\nset ylabel 't'\n";
        s += "plot " + f + " using 2:1 with lines title 'x = -4 sqrt(2) A t', " + f +
             " using 3:1 with lines title 'x = 4 sqrt(2) A t'\n";
    } else {
        s += "plot " + f + " using 1:2 with lines\n";
    }
    return s;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

}  // namespace dnls::runner
