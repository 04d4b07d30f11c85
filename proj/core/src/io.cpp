#include "rsq/io.hpp"

#include <cstdio>

#include "rsq/constants.hpp"

namespace rsq {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex16(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string format_g(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

void write_comment_header(std::ostream& os, const KeyValues& provenance) {
    for (const auto& [key, value] : provenance) os << "# " << key << "=" << value << "\n";
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const KeyValues& provenance) {
    write_comment_header(os, provenance);
    os << "t,g,r,n_th,dx2,dy2,n_sig\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        os << format_g(traj.t[i]) << ',' << format_g(traj.g[i]) << ','
           << format_g(traj.r[i]) << ',' << format_g(traj.n_th[i]) << ','
           << format_g(traj.dx2[i]) << ',' << format_g(traj.dy2[i]) << ','
           << format_g(traj.n_sig[i]) << '\n';
    }
}

namespace {

double field_value(const CellResult& cell, GridField field) {
    switch (field) {
        case GridField::squeezing_db: return cell.summary.squeezing_db;
        case GridField::antisqueezing_db: return cell.summary.antisqueezing_db;
        case GridField::dx2_min: return cell.summary.events.dx2_min;
        case GridField::dy2_max: return cell.summary.events.dy2_max;
    }
    return 0.0;
}

} // namespace

void write_grid_matrix_csv(std::ostream& os, const SweepGrid& grid, GridField field,
                           const KeyValues& provenance) {
    write_comment_header(os, provenance);
    const auto& spec = grid.spec;
    os << knob_name(spec.axis1.knob) << '\\' << knob_name(spec.axis2.knob);
    for (int j = 0; j < spec.axis2.count; ++j)
        os << ',' << format_g(spec.axis_value(spec.axis2, j));
    os << '\n';
    for (int i = 0; i < spec.axis1.count; ++i) {
        os << format_g(spec.axis_value(spec.axis1, i));
        for (int j = 0; j < spec.axis2.count; ++j) {
            const auto& cell = grid.at(i, j);
            os << ',' << (cell.ok ? format_g(field_value(cell, field)) : "nan");
        }
        os << '\n';
    }
}

void write_grid_table_csv(std::ostream& os, const SweepGrid& grid,
                          const KeyValues& provenance) {
    write_comment_header(os, provenance);
    const auto& spec = grid.spec;
    os << knob_name(spec.axis1.knob) << ',' << knob_name(spec.axis2.knob)
       << ",ok,squeezing_db,antisqueezing_db,dx2_min,dy2_max,t_m,t_A,n_generated_total,"
          "error\n";
    for (int i = 0; i < spec.axis1.count; ++i) {
        for (int j = 0; j < spec.axis2.count; ++j) {
            const auto& cell = grid.at(i, j);
            os << format_g(spec.axis_value(spec.axis1, i)) << ','
               << format_g(spec.axis_value(spec.axis2, j)) << ',' << (cell.ok ? 1 : 0);
            if (cell.ok) {
                const auto& s = cell.summary;
                os << ',' << format_g(s.squeezing_db) << ','
                   << format_g(s.antisqueezing_db) << ',' << format_g(s.events.dx2_min)
                   << ',' << format_g(s.events.dy2_max) << ',' << format_g(s.events.t_m)
                   << ',' << format_g(s.events.t_A) << ','
                   << format_g(cell.n_generated_total) << ',';
            } else {
                os << ",nan,nan,nan,nan,nan,nan,nan," << cell.error;
            }
            os << '\n';
        }
    }
}

void write_spectrum_csv(std::ostream& os, const DimensionlessRun& run,
                        const Trajectory& traj, const SqueezeEvents& events,
                        const std::vector<double>& omegas, const KeyValues& provenance) {
    write_comment_header(os, provenance);
    os << "omega,s_squeeze_phase,s_antisqueeze_phase\n";
    const double beta = 0.5 * phase_phi(run, events.t_m);
    for (const double omega : omegas) {
        const auto lo = s_of_omega(run, traj, events, omega, beta);
        const auto hi = s_of_omega(run, traj, events, omega, beta + 0.5 * constants::pi);
        os << format_g(omega) << ',' << format_g(lo.value) << ',' << format_g(hi.value)
           << '\n';
    }
}

} // namespace rsq
