#include "rsq/sweep.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "rsq/errors.hpp"
#include "rsq/io.hpp"

namespace rsq {

const char* knob_name(Knob k) {
    switch (k) {
        case Knob::g0: return "g0";
        case Knob::tau_p: return "tau_p";
        case Knob::f_s: return "f_s";
        case Knob::f_p: return "f_p";
    }
    return "?";
}

namespace {

void check_knob_range(Knob k, double lo, double hi) {
    const auto bad = [&](const char* why) {
        throw ConfigError(std::string("sweep axis ") + knob_name(k) + ": " + why);
    };
    if (!(lo <= hi)) bad("min must not exceed max");
    switch (k) {
        case Knob::g0:
            if (lo < 0.0) bad("g0 must be >= 0");
            break;
        case Knob::tau_p:
            if (!(lo > 0.0)) bad("tau_p must be > 0");
            break;
        case Knob::f_s:
        case Knob::f_p:
            if (!(lo > 0.0 && hi < 1.0)) bad("coupling ratio must lie in (0, 1)");
            break;
    }
}

struct KnobSet {
    double g0, tau_p, f_s, f_p, theta;

    void set(Knob k, double v) {
        switch (k) {
            case Knob::g0: g0 = v; break;
            case Knob::tau_p: tau_p = v; break;
            case Knob::f_s: f_s = v; break;
            case Knob::f_p: f_p = v; break;
        }
    }
};

CellResult evaluate_cell(const PhysicalConfig& cfg, const KnobSet& k,
                         const IntegratorOptions& opts) {
    CellResult cell;
    try {
        cell.run = derive_run(cfg, k.g0, k.tau_p, k.f_s, k.f_p, k.theta);
        const PumpEnvelope env(cell.run);
        const Trajectory traj = integrate(cell.run, env, opts);
        cell.summary = summarize(cell.run, traj);
        cell.n_generated_total = traj.n_generated_total;
        cell.ok = true;
    } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
    }
    return cell;
}

int resolve_threads(int threads, std::size_t jobs) {
    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw > 0 ? static_cast<int>(hw) : 1;
    }
    return static_cast<int>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs, 1)));
}

template <class Job>
void parallel_for(std::size_t n, int threads, Job&& job) {
    threads = resolve_threads(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) job(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::uint64_t hash_sweep_config(const SweepSpec& spec, const PhysicalConfig& cfg,
                                const IntegratorOptions& opts) {
    std::ostringstream ss;
    ss << "device:" << format_g(cfg.ring_radius) << ',' << format_g(cfg.n_eff) << ','
       << format_g(cfg.signal_wavelength) << ',' << format_g(cfg.chi2_eff) << ','
       << format_g(cfg.A_eff) << ',' << format_g(cfg.Q_sI) << ',' << format_g(cfg.Q_pI)
       << ',' << format_g(cfg.group_index) << ";axes:";
    for (const AxisSpec* ax : {&spec.axis1, &spec.axis2})
        ss << knob_name(ax->knob) << ':' << format_g(ax->min) << ':' << format_g(ax->max)
           << ':' << ax->count << ';';
    ss << "fixed:" << format_g(spec.g0) << ',' << format_g(spec.tau_p) << ','
       << format_g(spec.f_s) << ',' << format_g(spec.f_p) << ',' << format_g(spec.theta)
       << ";target:"
       << (spec.target_squeezing_db ? format_g(*spec.target_squeezing_db) : "none")
       << ";tol:" << format_g(opts.rel_tol) << ',' << format_g(opts.abs_tol);
    return fnv1a64(ss.str());
}

} // namespace

void SweepSpec::validate() const {
    if (axis1.knob == axis2.knob)
        throw ConfigError("sweep axes must name two different knobs");
    if (axis1.count < 2 || axis2.count < 2)
        throw ConfigError("sweep axes need at least 2 points each");
    check_knob_range(axis1.knob, axis1.min, axis1.max);
    check_knob_range(axis2.knob, axis2.min, axis2.max);
    if (!(g0 >= 0.0)) throw ConfigError("sweep fixed g0 must be >= 0");
    if (!(tau_p > 0.0)) throw ConfigError("sweep fixed tau_p must be > 0");
    if (!(f_s > 0.0 && f_s < 1.0)) throw ConfigError("sweep fixed f_s must lie in (0, 1)");
    if (!(f_p > 0.0 && f_p < 1.0)) throw ConfigError("sweep fixed f_p must lie in (0, 1)");
    if (target_squeezing_db) {
        // The constrained studies restrict pulse length and pump loading.
        const auto covers = [&](Knob k, double lo) {
            if (axis1.knob == k) return axis1.min >= lo;
            if (axis2.knob == k) return axis2.min >= lo;
            const double v = k == Knob::tau_p ? tau_p : f_p;
            return v >= lo;
        };
        if (!covers(Knob::tau_p, 1.0))
            throw ConfigError("constrained sweep requires tau_p >= 1");
        if (!covers(Knob::f_p, 0.01))
            throw ConfigError("constrained sweep requires f_p >= 0.01");
    }
}

double SweepSpec::axis_value(const AxisSpec& axis, int index) const {
    if (axis.count < 2) return axis.min;
    return axis.min + (axis.max - axis.min) * index / (axis.count - 1);
}

const CellResult& SweepGrid::at(int i, int j) const {
    return cells[static_cast<std::size_t>(i) * spec.axis2.count + j];
}

SweepGrid run_sweep(const SweepSpec& spec, const PhysicalConfig& cfg, int threads,
                    const IntegratorOptions& opts) {
    spec.validate();
    cfg.validate();

    SweepGrid grid;
    grid.spec = spec;
    grid.opts = opts;
    grid.config_hash = hash_sweep_config(spec, cfg, opts);
    const std::size_t n1 = spec.axis1.count, n2 = spec.axis2.count;
    grid.cells.resize(n1 * n2);

    parallel_for(n1 * n2, threads, [&](std::size_t idx) {
        const int i = static_cast<int>(idx / n2);
        const int j = static_cast<int>(idx % n2);
        KnobSet k{spec.g0, spec.tau_p, spec.f_s, spec.f_p, spec.theta};
        k.set(spec.axis1.knob, spec.axis_value(spec.axis1, i));
        k.set(spec.axis2.knob, spec.axis_value(spec.axis2, j));
        grid.cells[idx] = evaluate_cell(cfg, k, opts);
    });
    return grid;
}

namespace {

struct Eval {
    bool ok = false;
    double squeezing_db = 0.0;
    double antisqueezing_db = 0.0;
    SqueezeSummary summary;
    double n_generated_total = 0.0;
};

// Lexicographic merit: any feasible point beats any infeasible one; among
// feasible points lower antisqueezing wins; among infeasible ones higher
// squeezing wins; remaining ties prefer smaller g0, then smaller tau_p.
std::array<double, 4> merit(const Eval& e, double target_db, double g0, double tau_p) {
    if (!e.ok) return {2.0, 0.0, g0, tau_p};
    if (e.squeezing_db >= target_db) return {0.0, e.antisqueezing_db, g0, tau_p};
    return {1.0, -e.squeezing_db, g0, tau_p};
}

class Objective {
public:
    Objective(const PhysicalConfig& cfg, const IntegratorOptions& opts)
        : cfg_(cfg), opts_(opts) {}

    const Eval& operator()(const KnobSet& k) {
        char key[96];
        std::snprintf(key, sizeof key, "%.10g|%.10g|%.10g|%.10g", k.g0, k.tau_p, k.f_s,
                      k.f_p);
        auto [it, inserted] = cache_.try_emplace(key);
        if (inserted) {
            it->second = evaluate(k);
            ++misses_;
        }
        return it->second;
    }

    std::size_t evaluations() const { return misses_; }

private:
    Eval evaluate(const KnobSet& k) const {
        Eval e;
        const CellResult cell = evaluate_cell(cfg_, k, opts_);
        if (!cell.ok) return e;
        e.ok = true;
        e.squeezing_db = cell.summary.squeezing_db;
        e.antisqueezing_db = cell.summary.antisqueezing_db;
        e.summary = cell.summary;
        e.n_generated_total = cell.n_generated_total;
        return e;
    }

    PhysicalConfig cfg_;
    IntegratorOptions opts_;
    std::map<std::string, Eval> cache_;
    std::size_t misses_ = 0;
};

std::vector<double> linspace_step(double lo, double hi, double target_step) {
    if (!(hi > lo)) return {lo};
    const int n = static_cast<int>(std::ceil((hi - lo) / target_step - 1e-9)) + 1;
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

} // namespace

OptimumResult constrained_optimum(const PhysicalConfig& cfg, double target_db,
                                  const OptimizerBounds& bounds,
                                  const KnobResolution& resolution, int threads,
                                  const IntegratorOptions& opts) {
    cfg.validate();
    if (!(bounds.g0_min <= bounds.g0_max) || !(bounds.tau_p_min <= bounds.tau_p_max) ||
        !(bounds.f_s_min <= bounds.f_s_max) || !(bounds.f_p_min <= bounds.f_p_max))
        throw ConfigError("optimizer bounds are inverted");

    // Coarse scan. Loose tolerance is plenty for picking a basin.
    IntegratorOptions coarse_opts = opts;
    coarse_opts.rel_tol = std::max(opts.rel_tol, 1e-8);
    coarse_opts.abs_tol = std::max(opts.abs_tol, 1e-10);
    const auto g0s = linspace_step(bounds.g0_min, bounds.g0_max, 0.2);
    const auto taus = linspace_step(bounds.tau_p_min, bounds.tau_p_max, 2.5);
    const auto fss = linspace_step(bounds.f_s_min, bounds.f_s_max, 0.035);
    const auto fps = linspace_step(bounds.f_p_min, bounds.f_p_max, 0.0225);

    std::vector<KnobSet> coarse;
    coarse.reserve(g0s.size() * taus.size() * fss.size() * fps.size());
    for (const double g0 : g0s)
        for (const double tp : taus)
            for (const double fs : fss)
                for (const double fp : fps) coarse.push_back({g0, tp, fs, fp, 0.0});

    std::vector<Eval> evals(coarse.size());
    parallel_for(coarse.size(), threads, [&](std::size_t i) {
        Objective single(cfg, coarse_opts);
        evals[i] = single(coarse[i]);
    });

    std::size_t best = 0;
    auto best_merit = merit(evals[0], target_db, coarse[0].g0, coarse[0].tau_p);
    for (std::size_t i = 1; i < coarse.size(); ++i) {
        const auto m = merit(evals[i], target_db, coarse[i].g0, coarse[i].tau_p);
        if (m < best_merit) {
            best_merit = m;
            best = i;
        }
    }

    // Pattern search from the coarse incumbent down to the resolutions.
    IntegratorOptions search_opts = opts;
    search_opts.rel_tol = std::max(opts.rel_tol, 1e-9);
    search_opts.abs_tol = std::max(opts.abs_tol, 1e-11);
    Objective objective(cfg, search_opts);

    KnobSet x = coarse[best];
    auto x_merit = merit(objective(x), target_db, x.g0, x.tau_p);
    std::array<double, 4> step = {
        g0s.size() > 1 ? g0s[1] - g0s[0] : resolution.g0,
        taus.size() > 1 ? taus[1] - taus[0] : resolution.tau_p,
        fss.size() > 1 ? fss[1] - fss[0] : resolution.f_s,
        fps.size() > 1 ? fps[1] - fps[0] : resolution.f_p,
    };
    const std::array<double, 4> floor_step = {resolution.g0, resolution.tau_p,
                                              resolution.f_s, resolution.f_p};
    const std::array<double, 4> lo = {bounds.g0_min, bounds.tau_p_min, bounds.f_s_min,
                                      bounds.f_p_min};
    const std::array<double, 4> hi = {bounds.g0_max, bounds.tau_p_max, bounds.f_s_max,
                                      bounds.f_p_max};
    const std::array<Knob, 4> knobs = {Knob::g0, Knob::tau_p, Knob::f_s, Knob::f_p};

    // Poll stencil: single-knob moves plus all two-knob diagonal moves, so
    // the search can track the squeezing-target boundary, which runs
    // diagonally through (g0, f_s, tau_p) space.
    std::vector<std::array<int, 4>> directions;
    for (int d = 0; d < 4; ++d) {
        for (const int sgn : {+1, -1}) {
            std::array<int, 4> dir{};
            dir[d] = sgn;
            directions.push_back(dir);
        }
    }
    for (int d1 = 0; d1 < 4; ++d1) {
        for (int d2 = d1 + 1; d2 < 4; ++d2) {
            for (const int s1 : {+1, -1}) {
                for (const int s2 : {+1, -1}) {
                    std::array<int, 4> dir{};
                    dir[d1] = s1;
                    dir[d2] = s2;
                    directions.push_back(dir);
                }
            }
        }
    }

    for (int poll = 0; poll < 600; ++poll) {
        bool moved = false;
        KnobSet best_cand = x;
        auto best_cand_merit = x_merit;
        const std::array<double, 4> base = {x.g0, x.tau_p, x.f_s, x.f_p};
        for (const auto& dir : directions) {
            KnobSet cand = x;
            bool distinct = false;
            for (int d = 0; d < 4; ++d) {
                if (dir[d] == 0) continue;
                const double v = std::clamp(base[d] + dir[d] * step[d], lo[d], hi[d]);
                if (v != base[d]) distinct = true;
                cand.set(knobs[d], v);
            }
            if (!distinct) continue;
            const auto m = merit(objective(cand), target_db, cand.g0, cand.tau_p);
            if (m < best_cand_merit) {
                best_cand_merit = m;
                best_cand = cand;
            }
        }
        if (best_cand_merit < x_merit) {
            x = best_cand;
            x_merit = best_cand_merit;
            moved = true;
        }
        if (!moved) {
            bool at_floor = true;
            for (int d = 0; d < 4; ++d)
                if (step[d] > floor_step[d] * (1.0 + 1e-9)) at_floor = false;
            if (at_floor) break;
            for (int d = 0; d < 4; ++d) step[d] = std::max(0.5 * step[d], floor_step[d]);
        }
    }

    // Re-evaluate the incumbent at the caller's tolerance; if the tighter
    // integration narrowly misses the target, take resolution-sized steps up
    // in g0 (the squeezing-controlling knob) until it holds again.
    Objective final_objective(cfg, opts);
    Eval final = final_objective(x);
    const bool search_feasible = final.ok && x_merit[0] == 0.0;
    for (int bump = 0; bump < 3 && search_feasible && final.ok &&
                       final.squeezing_db < target_db && x.g0 < hi[0];
         ++bump) {
        x.g0 = std::min(x.g0 + resolution.g0, hi[0]);
        final = final_objective(x);
    }
    if (!final.ok)
        throw NumericalError("optimizer incumbent failed to integrate at final tolerance");

    OptimumResult result;
    result.feasible = final.squeezing_db >= target_db;
    result.g0 = x.g0;
    result.tau_p = x.tau_p;
    result.f_s = x.f_s;
    result.f_p = x.f_p;
    result.summary = final.summary;
    result.n_generated_total = final.n_generated_total;
    result.evaluations = objective.evaluations() + final_objective.evaluations() +
                         coarse.size();
    return result;
}

double min_g0_for_target(const PhysicalConfig& cfg, double tau_p, double f_s, double f_p,
                         double target_db, double g0_lo, double g0_hi,
                         const IntegratorOptions& opts) {
    const auto squeezing_at = [&](double g0) {
        const DimensionlessRun run = derive_run(cfg, g0, tau_p, f_s, f_p, 0.0);
        const PumpEnvelope env(run);
        return summarize(run, integrate(run, env, opts)).squeezing_db;
    };
    if (squeezing_at(g0_lo) >= target_db) return g0_lo;
    if (squeezing_at(g0_hi) < target_db)
        throw InfeasibleError("squeezing target " + format_g(target_db) +
                              " dB is unreachable with g0 <= " + format_g(g0_hi));
    double lo = g0_lo, hi = g0_hi;
    while (hi - lo > 1e-10 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (squeezing_at(mid) >= target_db ? hi : lo) = mid;
    }
    return hi;
}

} // namespace rsq
