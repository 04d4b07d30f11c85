#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rsq/constants.hpp"
#include "rsq/dynamics.hpp"
#include "rsq/errors.hpp"
#include "rsq/io.hpp"
#include "rsq/pump.hpp"
#include "rsq/spectrum.hpp"

namespace rsq::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// ---- config parsing -------------------------------------------------------

void check_keys(const ordered_json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + path + "." + key + "' in config");
    }
}

const ordered_json* find_section(const ordered_json& root, const std::string& name,
                                 bool required) {
    if (!root.contains(name)) {
        if (required) throw ConfigError("config section '" + name + "' is required");
        return nullptr;
    }
    if (!root[name].is_object())
        throw ConfigError("config section '" + name + "' must be an object");
    return &root[name];
}

double need_num(const ordered_json& obj, const std::string& path, const char* key) {
    const std::string full = path + "." + key;
    if (!obj.contains(key)) throw ConfigError(full + " is required");
    if (!obj[key].is_number()) throw ConfigError(full + " must be a number");
    return obj[key].get<double>();
}

double opt_num(const ordered_json& obj, const std::string& path, const char* key,
               double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ConfigError(path + "." + key + " must be a number");
    return obj[key].get<double>();
}

Knob parse_knob(const ordered_json& obj, const std::string& path) {
    const std::string full = path + ".knob";
    if (!obj.contains("knob") || !obj["knob"].is_string())
        throw ConfigError(full + " must be one of g0, tau_p, f_s, f_p");
    const std::string name = obj["knob"].get<std::string>();
    for (const Knob k : {Knob::g0, Knob::tau_p, Knob::f_s, Knob::f_p})
        if (name == knob_name(k)) return k;
    throw ConfigError(full + " must be one of g0, tau_p, f_s, f_p (got '" + name + "')");
}

AxisSpec parse_axis(const ordered_json& obj, const std::string& path) {
    check_keys(obj, path, {"knob", "min", "max", "count"});
    AxisSpec axis;
    axis.knob = parse_knob(obj, path);
    axis.min = need_num(obj, path, "min");
    axis.max = need_num(obj, path, "max");
    const double count = need_num(obj, path, "count");
    if (count < 2 || count != std::floor(count))
        throw ConfigError(path + ".count must be an integer >= 2");
    axis.count = static_cast<int>(count);
    return axis;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    check_keys(root, "config",
               {"physical", "knobs", "integrator", "output", "sweep", "optimize"});

    RunConfig cfg;
    const ordered_json& phys = *find_section(root, "physical", true);
    check_keys(phys, "physical",
               {"ring_radius", "n_eff", "signal_wavelength", "chi2_eff", "A_eff", "Q_sI",
                "Q_pI", "group_index"});
    cfg.physical.ring_radius = need_num(phys, "physical", "ring_radius");
    cfg.physical.n_eff = need_num(phys, "physical", "n_eff");
    cfg.physical.signal_wavelength = need_num(phys, "physical", "signal_wavelength");
    cfg.physical.chi2_eff = need_num(phys, "physical", "chi2_eff");
    cfg.physical.A_eff = need_num(phys, "physical", "A_eff");
    cfg.physical.Q_sI = need_num(phys, "physical", "Q_sI");
    cfg.physical.Q_pI = need_num(phys, "physical", "Q_pI");
    cfg.physical.group_index = need_num(phys, "physical", "group_index");
    cfg.physical.validate();

    const ordered_json& knobs = *find_section(root, "knobs", true);
    check_keys(knobs, "knobs", {"g0", "tau_p", "f_s", "f_p", "theta"});
    cfg.g0 = need_num(knobs, "knobs", "g0");
    cfg.tau_p = need_num(knobs, "knobs", "tau_p");
    cfg.f_s = need_num(knobs, "knobs", "f_s");
    cfg.f_p = need_num(knobs, "knobs", "f_p");
    cfg.theta = opt_num(knobs, "knobs", "theta", 0.0);

    if (const ordered_json* integ = find_section(root, "integrator", false)) {
        check_keys(*integ, "integrator",
                   {"rel_tol", "abs_tol", "t_start_override", "t_end_override"});
        cfg.integrator.rel_tol = opt_num(*integ, "integrator", "rel_tol", 1e-10);
        cfg.integrator.abs_tol = opt_num(*integ, "integrator", "abs_tol", 1e-12);
        if (integ->contains("t_start_override"))
            cfg.integrator.t_start_override =
                need_num(*integ, "integrator", "t_start_override");
        if (integ->contains("t_end_override"))
            cfg.integrator.t_end_override =
                need_num(*integ, "integrator", "t_end_override");
        if (!(cfg.integrator.rel_tol > 0.0) || !(cfg.integrator.abs_tol > 0.0))
            throw ConfigError("integrator tolerances must be positive");
    }

    if (const ordered_json* out = find_section(root, "output", false)) {
        check_keys(*out, "output", {"directory", "formats"});
        if (out->contains("directory")) {
            if (!(*out)["directory"].is_string())
                throw ConfigError("output.directory must be a string");
            cfg.out_dir = (*out)["directory"].get<std::string>();
        }
        if (out->contains("formats")) {
            const auto& fm = (*out)["formats"];
            if (!fm.is_array()) throw ConfigError("output.formats must be an array");
            cfg.want_csv = cfg.want_json = false;
            for (const auto& f : fm) {
                if (!f.is_string())
                    throw ConfigError("output.formats entries must be strings");
                const std::string s = f.get<std::string>();
                if (s == "csv")
                    cfg.want_csv = true;
                else if (s == "json")
                    cfg.want_json = true;
                else
                    throw ConfigError("output.formats entries must be csv or json (got '" +
                                      s + "')");
            }
            if (!cfg.want_csv && !cfg.want_json)
                throw ConfigError("output.formats must name at least one format");
        }
    }

    if (const ordered_json* sw = find_section(root, "sweep", false)) {
        check_keys(*sw, "sweep", {"axis1", "axis2", "target_squeezing_db"});
        SweepSpec spec;
        if (!sw->contains("axis1") || !sw->contains("axis2"))
            throw ConfigError("sweep.axis1 and sweep.axis2 are required");
        spec.axis1 = parse_axis((*sw)["axis1"], "sweep.axis1");
        spec.axis2 = parse_axis((*sw)["axis2"], "sweep.axis2");
        spec.g0 = cfg.g0;
        spec.tau_p = cfg.tau_p;
        spec.f_s = cfg.f_s;
        spec.f_p = cfg.f_p;
        spec.theta = cfg.theta;
        if (sw->contains("target_squeezing_db"))
            spec.target_squeezing_db = need_num(*sw, "sweep", "target_squeezing_db");
        cfg.sweep = spec;
    }

    if (const ordered_json* op = find_section(root, "optimize", false)) {
        check_keys(*op, "optimize", {"target_db", "bounds", "resolution"});
        cfg.optimize_target_db = opt_num(*op, "optimize", "target_db", 10.0);
        if (op->contains("bounds")) {
            const auto& b = (*op)["bounds"];
            check_keys(b, "optimize.bounds",
                       {"g0_min", "g0_max", "tau_p_min", "tau_p_max", "f_s_min",
                        "f_s_max", "f_p_min", "f_p_max"});
            auto& ob = cfg.optimize_bounds;
            ob.g0_min = opt_num(b, "optimize.bounds", "g0_min", ob.g0_min);
            ob.g0_max = opt_num(b, "optimize.bounds", "g0_max", ob.g0_max);
            ob.tau_p_min = opt_num(b, "optimize.bounds", "tau_p_min", ob.tau_p_min);
            ob.tau_p_max = opt_num(b, "optimize.bounds", "tau_p_max", ob.tau_p_max);
            ob.f_s_min = opt_num(b, "optimize.bounds", "f_s_min", ob.f_s_min);
            ob.f_s_max = opt_num(b, "optimize.bounds", "f_s_max", ob.f_s_max);
            ob.f_p_min = opt_num(b, "optimize.bounds", "f_p_min", ob.f_p_min);
            ob.f_p_max = opt_num(b, "optimize.bounds", "f_p_max", ob.f_p_max);
        }
        if (op->contains("resolution")) {
            const auto& r = (*op)["resolution"];
            check_keys(r, "optimize.resolution", {"g0", "tau_p", "f_s", "f_p"});
            auto& res = cfg.optimize_resolution;
            res.g0 = opt_num(r, "optimize.resolution", "g0", res.g0);
            res.tau_p = opt_num(r, "optimize.resolution", "tau_p", res.tau_p);
            res.f_s = opt_num(r, "optimize.resolution", "f_s", res.f_s);
            res.f_p = opt_num(r, "optimize.resolution", "f_p", res.f_p);
        }
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

RunConfig default_config() {
    RunConfig cfg;
    cfg.physical = PhysicalConfig::reference_device();
    cfg.g0 = 1.0;
    cfg.tau_p = 3.0;
    cfg.f_s = 0.045;
    cfg.f_p = 0.03;
    return cfg;
}

RunConfig load_effective_config(const CliOptions& cli, bool config_required) {
    RunConfig cfg;
    if (!cli.config_path.empty()) {
        cfg = parse_config_file(cli.config_path);
    } else if (config_required) {
        throw ConfigError("--config is required for this subcommand");
    } else {
        cfg = default_config();
    }
    if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
    if (!cli.format.empty()) {
        if (cli.format == "csv") {
            cfg.want_csv = true;
            cfg.want_json = false;
        } else if (cli.format == "json") {
            cfg.want_csv = false;
            cfg.want_json = true;
        } else if (cli.format == "both") {
            cfg.want_csv = cfg.want_json = true;
        } else {
            throw ConfigError("--format must be csv, json, or both");
        }
    }
    return cfg;
}

namespace {

// ---- provenance and output helpers ---------------------------------------

ordered_json physical_json(const PhysicalConfig& p) {
    return ordered_json{{"ring_radius", p.ring_radius},
                        {"n_eff", p.n_eff},
                        {"signal_wavelength", p.signal_wavelength},
                        {"chi2_eff", p.chi2_eff},
                        {"A_eff", p.A_eff},
                        {"Q_sI", p.Q_sI},
                        {"Q_pI", p.Q_pI},
                        {"group_index", p.group_index}};
}

ordered_json knobs_json(const RunConfig& cfg) {
    return ordered_json{{"g0", cfg.g0},
                        {"tau_p", cfg.tau_p},
                        {"f_s", cfg.f_s},
                        {"f_p", cfg.f_p},
                        {"theta", cfg.theta}};
}

ordered_json integrator_json(const IntegratorOptions& o) {
    ordered_json j{{"rel_tol", o.rel_tol}, {"abs_tol", o.abs_tol}};
    if (o.t_start_override) j["t_start_override"] = *o.t_start_override;
    if (o.t_end_override) j["t_end_override"] = *o.t_end_override;
    return j;
}

// The hash covers the physics inputs (device, knobs, integrator, command
// specifics), not the output destination, so identical physics reruns give
// identical data bytes wherever they land.
std::string config_hash(const RunConfig& cfg, const ordered_json& command_extra) {
    ordered_json j{{"physical", physical_json(cfg.physical)},
                   {"knobs", knobs_json(cfg)},
                   {"integrator", integrator_json(cfg.integrator)},
                   {"command", command_extra}};
    return hex16(fnv1a64(j.dump()));
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
    return out;
}

void write_json_file(const std::string& dir, const std::string& name,
                     const ordered_json& j) {
    auto out = open_out(dir, name);
    out << j.dump(2) << "\n";
}

constexpr const char* kDbConvention =
    "squeezing_db is positive-good (noise below vacuum); antisqueezing_db is "
    "positive noise above vacuum";

KeyValues base_provenance(const std::string& tool, const std::string& hash,
                          const RunConfig& cfg) {
    return {{"tool", tool},
            {"config_hash", hash},
            {"g0", format_g(cfg.g0)},
            {"tau_p", format_g(cfg.tau_p)},
            {"f_s", format_g(cfg.f_s)},
            {"f_p", format_g(cfg.f_p)},
            {"theta", format_g(cfg.theta)}};
}

ordered_json summary_json(const DimensionlessRun& run, const SqueezeSummary& s,
                          bool has_events) {
    ordered_json j;
    j["convention"] = kDbConvention;
    j["squeezing_db"] = s.squeezing_db;
    j["antisqueezing_db"] = s.antisqueezing_db;
    j["s_min0"] = s.s_min0;
    j["s_max0"] = s.s_max0;
    if (has_events) {
        j["events"] = ordered_json{{"t_m", s.events.t_m},
                                   {"dx2_min", s.events.dx2_min},
                                   {"t_A", s.events.t_A},
                                   {"dy2_max", s.events.dy2_max}};
    } else {
        j["events"] = nullptr;
    }
    j["derived"] = ordered_json{{"Gamma_sL", run.Gamma_sL},
                                {"Gamma_pL", run.Gamma_pL},
                                {"sigma_ell_p", run.sigma_ell_p},
                                {"ell_p", run.ell_p},
                                {"sigma_p", run.sigma_p},
                                {"escape_s", run.escape_s},
                                {"pump_finesse", constants::pi / (1.0 - run.sigma_ell_p)}};
    return j;
}

void print_summary_table(const SqueezeSummary& s, double n_total) {
    std::printf("  squeezing_db       %10.4f   (positive = noise below vacuum)\n",
                s.squeezing_db);
    std::printf("  antisqueezing_db   %10.4f\n", s.antisqueezing_db);
    std::printf("  dx2_min            %10.6f   at t~ = %.4f\n", s.events.dx2_min,
                s.events.t_m);
    std::printf("  dy2_max            %10.4g   at t~ = %.4f\n", s.events.dy2_max,
                s.events.t_A);
    std::printf("  n_generated_total  %10.2f\n", n_total);
}

std::vector<double> spectrum_omegas(const DimensionlessRun& run) {
    std::vector<double> omegas(201);
    const double span = 5.0 * run.Gamma_sL;
    for (int i = 0; i < 201; ++i) omegas[i] = -span + 2.0 * span * i / 200;
    return omegas;
}

} // namespace

int cmd_run(const RunConfig& cfg, const CliOptions& cli) {
    (void)cli;
    const std::string hash = config_hash(cfg, ordered_json{{"name", "run"}});
    const DimensionlessRun run =
        derive_run(cfg.physical, cfg.g0, cfg.tau_p, cfg.f_s, cfg.f_p, cfg.theta);
    const PumpEnvelope env(run);
    const Trajectory traj = integrate(run, env, cfg.integrator);

    SqueezeSummary summary;
    const bool pumped = cfg.g0 > 0.0;
    if (pumped) {
        summary = summarize(run, traj);
    } else {
        // No pump: the state stays vacuum, the spectrum is flat at the shot
        // noise floor, and there is no interior extremum to locate.
        summary.events = {traj.t.front(), 1.0, traj.t.front(), 1.0};
    }

    const KeyValues prov = base_provenance("ringsqueeze run", hash, cfg);
    if (cfg.want_csv) {
        auto tcsv = open_out(cfg.out_dir, "trajectory.csv");
        write_trajectory_csv(tcsv, traj, prov);
        auto scsv = open_out(cfg.out_dir, "spectrum.csv");
        write_spectrum_csv(scsv, run, traj, summary.events, spectrum_omegas(run), prov);
    }
    if (cfg.want_json) {
        ordered_json j;
        j["tool"] = "ringsqueeze run";
        j["config_hash"] = hash;
        j["knobs"] = knobs_json(cfg);
        j.update(summary_json(run, summary, pumped));
        j["n_generated_total"] = traj.n_generated_total;
        j["photons"] = ordered_json{
            {"N_c", pumped ? pump_strength_to_photons(cfg.physical, cfg.g0) : 0.0},
            {"peak_ring_pump",
             ring_pump_photons(cfg.physical, run, env.peak().value)}};
        write_json_file(cfg.out_dir, "summary.json", j);
    }
    std::printf("run %s  (config %s)\n", cfg.out_dir.c_str(), hash.c_str());
    print_summary_table(summary, traj.n_generated_total);
    return 0;
}

namespace {

// ---- figure replication ---------------------------------------------------

struct FamilyFigure {
    const char* id;
    Knob varied;
    std::vector<double> values;
    double g0, tau_p, f_s, f_p;
};

struct GridFigure {
    const char* id;
    GridField field;
    AxisSpec axis1, axis2;
    double g0, tau_p, f_s, f_p;
};

const std::vector<FamilyFigure>& family_figures() {
    static const std::vector<FamilyFigure> figs = {
        {"fig2", Knob::tau_p, {1, 3, 5, 7, 9, 11}, 1.0, 0.0, 0.045, 0.03},
        {"fig3", Knob::f_p, {0.01, 0.02, 0.03, 0.04, 0.05, 0.06}, 1.0, 3.0, 0.045, 0.0},
    };
    return figs;
}

const std::vector<GridFigure>& grid_figures() {
    static const std::vector<GridFigure> figs = {
        {"fig4", GridField::squeezing_db, {Knob::f_s, 0.02, 0.10, 41},
         {Knob::tau_p, 1.0, 16.0, 41}, 0.7, 0.0, 0.0, 0.03},
        {"fig5", GridField::antisqueezing_db, {Knob::f_s, 0.02, 0.10, 41},
         {Knob::tau_p, 1.0, 16.0, 41}, 0.7, 0.0, 0.0, 0.03},
        {"fig6", GridField::squeezing_db, {Knob::f_p, 0.01, 0.06, 41},
         {Knob::tau_p, 1.0, 16.0, 41}, 0.7, 0.0, 0.05, 0.0},
        {"fig7", GridField::antisqueezing_db, {Knob::f_p, 0.01, 0.06, 41},
         {Knob::tau_p, 1.0, 16.0, 41}, 0.7, 0.0, 0.05, 0.0},
        {"fig8", GridField::squeezing_db, {Knob::g0, 0.5, 3.0, 41},
         {Knob::tau_p, 1.0, 16.0, 41}, 0.0, 0.0, 0.05, 0.01},
        {"fig9", GridField::antisqueezing_db, {Knob::g0, 0.5, 3.0, 41},
         {Knob::tau_p, 1.0, 16.0, 41}, 0.0, 0.0, 0.05, 0.01},
    };
    return figs;
}

std::string valid_figure_ids() {
    std::string ids;
    for (const auto& f : family_figures()) ids += std::string(f.id) + " ";
    for (const auto& f : grid_figures()) ids += std::string(f.id) + " ";
    ids.pop_back();
    return ids;
}

int replicate_family(const RunConfig& base, const FamilyFigure& fig, int threads) {
    (void)threads;
    RunConfig cfg = base;
    cfg.g0 = fig.g0;
    cfg.tau_p = fig.tau_p;
    cfg.f_s = fig.f_s;
    cfg.f_p = fig.f_p;
    cfg.theta = 0.0;

    const std::string hash = config_hash(
        cfg, ordered_json{{"name", "replicate"}, {"figure", fig.id}});
    ordered_json curves = ordered_json::array();

    auto events_csv = open_out(cfg.out_dir, std::string(fig.id) + "_events.csv");
    KeyValues prov = {{"tool", "ringsqueeze replicate"},
                      {"figure", fig.id},
                      {"config_hash", hash}};
    write_comment_header(events_csv, prov);
    events_csv << knob_name(fig.varied)
               << ",r_max,dx2_min,t_m,dy2_max,t_A,squeezing_db,antisqueezing_db,"
                  "n_generated_total\n";

    for (const double value : fig.values) {
        RunConfig point = cfg;
        if (fig.varied == Knob::tau_p) point.tau_p = value;
        if (fig.varied == Knob::f_p) point.f_p = value;
        const DimensionlessRun run = derive_run(point.physical, point.g0, point.tau_p,
                                                point.f_s, point.f_p, point.theta);
        const PumpEnvelope env(run);
        const Trajectory traj = integrate(run, env, point.integrator);
        const SqueezeSummary s = summarize(run, traj);
        double r_max = 0.0;
        for (const double r : traj.r) r_max = std::max(r_max, r);

        std::ostringstream name;
        name << fig.id << "_traj_" << knob_name(fig.varied) << "_" << format_g(value)
             << ".csv";
        KeyValues tprov = prov;
        tprov.emplace_back(knob_name(fig.varied), format_g(value));
        auto tcsv = open_out(point.out_dir, name.str());
        write_trajectory_csv(tcsv, traj, tprov);

        events_csv << format_g(value) << ',' << format_g(r_max) << ','
                   << format_g(s.events.dx2_min) << ',' << format_g(s.events.t_m) << ','
                   << format_g(s.events.dy2_max) << ',' << format_g(s.events.t_A) << ','
                   << format_g(s.squeezing_db) << ',' << format_g(s.antisqueezing_db)
                   << ',' << format_g(traj.n_generated_total) << '\n';
        curves.push_back(ordered_json{{knob_name(fig.varied), value},
                                      {"file", name.str()},
                                      {"squeezing_db", s.squeezing_db},
                                      {"antisqueezing_db", s.antisqueezing_db}});
    }

    ordered_json meta;
    meta["tool"] = "ringsqueeze replicate";
    meta["figure"] = fig.id;
    meta["config_hash"] = hash;
    meta["convention"] = kDbConvention;
    meta["fixed"] = knobs_json(cfg);
    meta["varied"] = knob_name(fig.varied);
    meta["curves"] = curves;
    write_json_file(cfg.out_dir, std::string(fig.id) + "_meta.json", meta);
    std::printf("replicate %s: %zu curves -> %s\n", fig.id, fig.values.size(),
                cfg.out_dir.c_str());
    return 0;
}

void write_grid_outputs(const RunConfig& cfg, const SweepGrid& grid,
                        const std::string& stem, GridField field,
                        const std::string& tool, const std::string& extra_note) {
    const std::string hash = hex16(grid.config_hash);
    KeyValues prov = {{"tool", tool},
                      {"config_hash", hash},
                      {"axis1", knob_name(grid.spec.axis1.knob)},
                      {"axis2", knob_name(grid.spec.axis2.knob)}};
    if (!extra_note.empty()) prov.emplace_back("note", extra_note);

    if (cfg.want_csv) {
        const std::string matrix_name =
            stem + "_" + (field == GridField::squeezing_db ? "squeezing_db"
                                                           : "antisqueezing_db") +
            ".csv";
        auto mcsv = open_out(cfg.out_dir, matrix_name);
        write_grid_matrix_csv(mcsv, grid, field, prov);
        auto tcsv = open_out(cfg.out_dir, stem + "_table.csv");
        write_grid_table_csv(tcsv, grid, prov);
    }
    ordered_json meta;
    meta["tool"] = tool;
    meta["config_hash"] = hash;
    meta["convention"] = kDbConvention;
    for (const auto* ax : {&grid.spec.axis1, &grid.spec.axis2}) {
        meta[ax == &grid.spec.axis1 ? "axis1" : "axis2"] =
            ordered_json{{"knob", knob_name(ax->knob)},
                         {"min", ax->min},
                         {"max", ax->max},
                         {"count", ax->count}};
    }
    meta["fixed"] = ordered_json{{"g0", grid.spec.g0},
                                 {"tau_p", grid.spec.tau_p},
                                 {"f_s", grid.spec.f_s},
                                 {"f_p", grid.spec.f_p},
                                 {"theta", grid.spec.theta}};
    meta["integrator"] = integrator_json(grid.opts);
    std::size_t failed = 0;
    for (const auto& c : grid.cells)
        if (!c.ok) ++failed;
    meta["cells"] = grid.cells.size();
    meta["failed_cells"] = failed;
    write_json_file(cfg.out_dir, stem + "_meta.json", meta);
}

int replicate_grid(const RunConfig& base, const GridFigure& fig, int threads) {
    RunConfig cfg = base;
    SweepSpec spec;
    spec.axis1 = fig.axis1;
    spec.axis2 = fig.axis2;
    spec.g0 = fig.g0;
    spec.tau_p = fig.tau_p > 0 ? fig.tau_p : 1.0;
    spec.f_s = fig.f_s > 0 ? fig.f_s : 0.05;
    spec.f_p = fig.f_p > 0 ? fig.f_p : 0.03;
    spec.theta = 0.0;

    const SweepGrid grid = run_sweep(spec, cfg.physical, threads, cfg.integrator);
    write_grid_outputs(cfg, grid, fig.id, fig.field, "ringsqueeze replicate", "");
    std::printf("replicate %s: %d x %d grid -> %s\n", fig.id, fig.axis1.count,
                fig.axis2.count, cfg.out_dir.c_str());
    return 0;
}

} // namespace

int cmd_replicate(const RunConfig& cfg, const CliOptions& cli) {
    for (const auto& fig : family_figures())
        if (cli.figure == fig.id) return replicate_family(cfg, fig, cli.threads);
    for (const auto& fig : grid_figures())
        if (cli.figure == fig.id) return replicate_grid(cfg, fig, cli.threads);
    throw ConfigError("unknown figure '" + cli.figure + "'; valid ids: " +
                      valid_figure_ids());
}

int cmd_sweep(const RunConfig& cfg, const CliOptions& cli) {
    if (!cfg.sweep)
        throw ConfigError("config section 'sweep' is required for the sweep subcommand");
    const SweepGrid grid = run_sweep(*cfg.sweep, cfg.physical, cli.threads,
                                     cfg.integrator);
    write_grid_outputs(cfg, grid, "sweep", GridField::squeezing_db, "ringsqueeze sweep",
                       "");
    // The antisqueezing matrix complements the squeezing one written above.
    if (cfg.want_csv) {
        KeyValues prov = {{"tool", "ringsqueeze sweep"},
                          {"config_hash", hex16(grid.config_hash)}};
        auto mcsv = open_out(cfg.out_dir, "sweep_antisqueezing_db.csv");
        write_grid_matrix_csv(mcsv, grid, GridField::antisqueezing_db, prov);
    }
    std::size_t failed = 0;
    for (const auto& c : grid.cells)
        if (!c.ok) ++failed;
    std::printf("sweep: %zu cells (%zu failed) -> %s\n", grid.cells.size(), failed,
                cfg.out_dir.c_str());
    return 0;
}

int cmd_optimize(const RunConfig& cfg, const CliOptions& cli) {
    const std::string hash = config_hash(
        cfg, ordered_json{{"name", "optimize"},
                          {"target_db", cfg.optimize_target_db},
                          {"bounds",
                           ordered_json{{"g0", {cfg.optimize_bounds.g0_min,
                                                cfg.optimize_bounds.g0_max}},
                                        {"tau_p", {cfg.optimize_bounds.tau_p_min,
                                                   cfg.optimize_bounds.tau_p_max}},
                                        {"f_s", {cfg.optimize_bounds.f_s_min,
                                                 cfg.optimize_bounds.f_s_max}},
                                        {"f_p", {cfg.optimize_bounds.f_p_min,
                                                 cfg.optimize_bounds.f_p_max}}}}});
    const OptimumResult opt =
        constrained_optimum(cfg.physical, cfg.optimize_target_db, cfg.optimize_bounds,
                            cfg.optimize_resolution, cli.threads, cfg.integrator);

    const DimensionlessRun run =
        derive_run(cfg.physical, opt.g0, opt.tau_p, opt.f_s, opt.f_p, 0.0);
    const double peak_ring =
        ring_pump_photons(cfg.physical, run, PumpEnvelope(run).peak().value);

    if (cfg.want_json) {
        ordered_json j;
        j["tool"] = "ringsqueeze optimize";
        j["config_hash"] = hash;
        j["convention"] = kDbConvention;
        j["target_db"] = cfg.optimize_target_db;
        j["feasible"] = opt.feasible;
        j["knobs"] = ordered_json{{"g0", opt.g0},
                                  {"tau_p", opt.tau_p},
                                  {"f_s", opt.f_s},
                                  {"f_p", opt.f_p}};
        j["squeezing_db"] = opt.summary.squeezing_db;
        j["antisqueezing_db"] = opt.summary.antisqueezing_db;
        j["events"] = ordered_json{{"t_m", opt.summary.events.t_m},
                                   {"dx2_min", opt.summary.events.dx2_min},
                                   {"t_A", opt.summary.events.t_A},
                                   {"dy2_max", opt.summary.events.dy2_max}};
        j["n_generated_total"] = opt.n_generated_total;
        j["photons"] = ordered_json{{"N_c", pump_strength_to_photons(cfg.physical, opt.g0)},
                                    {"peak_ring_pump", peak_ring}};
        j["evaluations"] = opt.evaluations;
        write_json_file(cfg.out_dir, "optimum.json", j);
    }

    std::printf("optimize: target %.2f dB -> %s\n", cfg.optimize_target_db,
                opt.feasible ? "feasible" : "INFEASIBLE (best achievable reported)");
    std::printf("  knobs: g0=%.4f tau_p=%.4f f_s=%.4f f_p=%.4f\n", opt.g0, opt.tau_p,
                opt.f_s, opt.f_p);
    print_summary_table(opt.summary, opt.n_generated_total);
    return opt.feasible ? 0 : 4;
}

int cmd_validate_pump(const RunConfig& cfg, const CliOptions& cli) {
    (void)cli;
    const std::string hash = config_hash(cfg, ordered_json{{"name", "validate-pump"}});
    const DimensionlessRun run =
        derive_run(cfg.physical, cfg.g0 > 0 ? cfg.g0 : 1.0, cfg.tau_p, cfg.f_s, cfg.f_p,
                   cfg.theta);
    const double finesse = constants::pi / (1.0 - run.sigma_ell_p);

    if (1.0 - run.sigma_p * run.sigma_p < 1e-12) {
        std::printf("validate-pump: in-ring field vanishes (sigma_p -> 1); "
                    "comparison skipped\n");
        if (cfg.want_json) {
            write_json_file(cfg.out_dir, "pump_validation.json",
                            ordered_json{{"tool", "ringsqueeze validate-pump"},
                                         {"config_hash", hash},
                                         {"skipped", "in-ring field vanishes"},
                                         {"pump_finesse", finesse}});
        }
        return 0;
    }

    const PumpEnvelope env(run);
    const double dt = 1.0 / 16.0;
    const double lo = -6.0 * run.tau_p - 1.0;
    const double hi = 6.0 * run.tau_p + 10.0 / run.Gamma_pL + 1.0;
    const int n = static_cast<int>(std::ceil((hi - lo) / dt)) + 1;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = lo + dt * i;
    const std::vector<double> exact = g_exact_oracle(run, grid);

    double peak_exact = 0.0;
    for (const double v : exact) peak_exact = std::max(peak_exact, v);
    const double peak_analytic = env.peak().value;
    const double peak_dev = std::abs(peak_analytic - peak_exact) / peak_exact;

    if (cfg.want_csv) {
        KeyValues prov = base_provenance("ringsqueeze validate-pump", hash, cfg);
        prov.emplace_back("pump_finesse", format_g(finesse));
        auto csv = open_out(cfg.out_dir, "pump_comparison.csv");
        write_comment_header(csv, prov);
        csv << "t,g_analytic,g_exact\n";
        for (int i = 0; i < n; ++i)
            csv << format_g(grid[i]) << ',' << format_g(env(grid[i])) << ','
                << format_g(exact[i]) << '\n';
    }

    const bool in_regime = finesse >= 20.0;
    const bool pass = peak_dev < 0.10;
    std::printf("validate-pump: finesse %.1f, peak deviation %.2f%% (analytic vs exact)\n",
                finesse, 100.0 * peak_dev);
    std::printf("  exact/analytic peak ratio %.4f (analytic/exact %.4f)\n",
                peak_exact / peak_analytic, peak_analytic / peak_exact);
    if (in_regime)
        std::printf("  10%% bound: %s\n", pass ? "PASS" : "FAIL");
    else
        std::printf("  finesse < 20: outside the analytic regime, bound not applied "
                    "(informational)\n");

    if (cfg.want_json) {
        ordered_json j;
        j["tool"] = "ringsqueeze validate-pump";
        j["config_hash"] = hash;
        j["pump_finesse"] = finesse;
        j["peak_analytic"] = peak_analytic;
        j["peak_exact"] = peak_exact;
        j["peak_relative_deviation"] = peak_dev;
        j["exact_over_analytic"] = peak_exact / peak_analytic;
        j["bound_applied"] = in_regime;
        j["bound_pass"] = in_regime ? ordered_json(pass) : ordered_json(nullptr);
        write_json_file(cfg.out_dir, "pump_validation.json", j);
    }
    return 0;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"pulsed squeezed-light simulator for a chi(2) ring resonator"};
    app.require_subcommand(1);

    CliOptions cli;
    const auto add_common = [&cli](CLI::App* sub) {
        sub->add_option("--config", cli.config_path, "JSON config file");
        sub->add_option("--out-dir", cli.out_dir, "output directory (overrides config)");
        sub->add_option("--threads", cli.threads,
                        "worker threads for grid evaluation (0 = all cores)");
        sub->add_option("--format", cli.format, "csv, json, or both (overrides config)");
    };

    CLI::App* run = app.add_subcommand("run", "single trajectory, spectrum, and summary");
    add_common(run);
    CLI::App* rep = app.add_subcommand("replicate", "bundled study parameter sets");
    rep->add_option("figure", cli.figure, "one of: " + valid_figure_ids())->required();
    add_common(rep);
    CLI::App* swp = app.add_subcommand("sweep", "2-D knob grid from the config");
    add_common(swp);
    CLI::App* opt = app.add_subcommand("optimize",
                                       "constrained antisqueezing minimization");
    add_common(opt);
    CLI::App* val = app.add_subcommand("validate-pump",
                                       "analytic envelope vs exact ring response");
    add_common(val);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(load_effective_config(cli, true), cli);
        if (rep->parsed()) return cmd_replicate(load_effective_config(cli, false), cli);
        if (swp->parsed()) return cmd_sweep(load_effective_config(cli, true), cli);
        if (opt->parsed()) return cmd_optimize(load_effective_config(cli, false), cli);
        if (val->parsed()) return cmd_validate_pump(load_effective_config(cli, true), cli);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return 4;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}

} // namespace rsq::app
