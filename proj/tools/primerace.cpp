// primerace: comparative prime-number-theory toolkit.
//
// Subcommands: race, chebyshev, density, explicit, independence, barrier.
// Exit codes: 0 ok, 2 usage, 3 I/O, 4 data validation, 5 inconclusive.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "primerace/barrier.hpp"
#include "primerace/density.hpp"
#include "primerace/errors.hpp"
#include "primerace/explicit_formula.hpp"
#include "primerace/manifest.hpp"
#include "primerace/race.hpp"
#include "primerace/svg.hpp"
#include "primerace/zeros.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace primerace;

namespace {

// removes partial outputs when a command fails mid-write
struct OutputTracker {
    std::vector<std::string> paths;
    bool keep = false;
    std::string track(const std::string& p) {
        paths.push_back(p);
        return p;
    }
    ~OutputTracker() {
        if (keep) return;
        for (const auto& p : paths) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
};

unsigned env_threads() {
    if (const char* v = std::getenv("PRIMERACE_THREADS")) {
        const long n = std::atol(v);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    return 1;
}

struct CommonOpts {
    std::string out_dir = ".";
    unsigned threads = env_threads();
    std::uint64_t seed = 0;
    std::size_t segment_bytes = std::size_t{1} << 18;
    std::string wheel = "mod30";

    void attach(CLI::App* cmd) {
        cmd->add_option("-o,--out-dir", out_dir, "directory for output artifacts");
        cmd->add_option("--threads", threads, "worker thread count")
            ->envname("PRIMERACE_THREADS");
        cmd->add_option("--seed", seed, "master RNG seed");
        cmd->add_option("--segment-bytes", segment_bytes,
                        "sieve segment bitmap size in bytes");
        cmd->add_option("--wheel", wheel, "presieve wheel: none, mod30, mod210")
            ->check(CLI::IsMember({"none", "mod30", "mod210"}));
    }

    SieveConfig sieve_config() const {
        SieveConfig cfg;
        cfg.segment_bytes = segment_bytes;
        cfg.thread_count = threads;
        cfg.wheel = wheel == "none" ? Wheel::none
                    : wheel == "mod210" ? Wheel::mod210
                                        : Wheel::mod30;
        return cfg;
    }

    std::string path(const std::string& name) const {
        fs::create_directories(out_dir);
        return (fs::path(out_dir) / name).string();
    }
};

void write_json(const std::string& path, const ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    std::vector<double> xs(n);
    const double la = std::log(lo), lb = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        xs[i] = std::exp(la + (lb - la) * double(i) / double(n - 1));
    return xs;
}

// ---------------------------------------------------------------- race
int cmd_race(const CommonOpts& common, std::uint64_t k,
             std::vector<std::uint32_t> residues, std::uint64_t limit,
             const std::string& checkpoint, std::uint64_t checkpoint_every,
             bool resume, RunManifest manifest) {
    OutputTracker outs;
    RaceOptions opts;
    opts.event_csv_path = outs.track(common.path("race_events.csv"));
    if (resume) {
        opts.resume_checkpoint = checkpoint;
        outs.paths.pop_back();  // appending to an existing spill; keep it
    }
    if (!checkpoint.empty()) {
        opts.checkpoint_path = checkpoint;
        opts.checkpoint_every_segments = checkpoint_every;
    }

    auto st = run_race(k, residues, limit, common.sieve_config(), opts);
    st.write_snapshot_json(outs.track(common.path("race_snapshot.json")));

    // headline numbers for scripts on stdout
    std::printf("x=%llu", static_cast<unsigned long long>(st.x_current()));
    for (std::size_t i = 0; i + 1 < residues.size(); ++i)
        std::printf(" delta(%u,%u)=%lld", residues[i], residues[i + 1],
                    static_cast<long long>(delta(st, residues[i], residues[i + 1])));
    std::printf(" events=%llu\n", static_cast<unsigned long long>(st.events_emitted()));

    manifest.finished_at = iso8601_now();
    manifest.write(outs.track(common.path("manifest.json")));
    outs.keep = true;
    return 0;
}

// ---------------------------------------------------------------- chebyshev
int cmd_chebyshev(const CommonOpts& common, double x, std::uint64_t limit,
                  RunManifest manifest) {
    OutputTracker outs;
    const double value = chebyshev_weighted_sum(x, limit, common.sieve_config());
    std::printf("%.12g\n", value);
    ordered_json j;
    j["x"] = x;
    j["limit"] = limit;
    j["sum"] = value;
    write_json(outs.track(common.path("chebyshev.json")), j);
    manifest.finished_at = iso8601_now();
    manifest.write(outs.track(common.path("manifest.json")));
    outs.keep = true;
    return 0;
}

// ---------------------------------------------------------------- density
int cmd_density(const CommonOpts& common, std::uint64_t k,
                std::vector<std::uint32_t> residues,
                std::vector<std::uint32_t> ordering, bool gsh, bool empirical,
                const std::string& zeros_path, double T, std::uint64_t n_samples,
                std::uint64_t X, bool no_fejer, RunManifest manifest) {
    OutputTracker outs;
    if (ordering.empty()) ordering = residues;
    if (gsh == empirical)
        throw InvalidArgumentError("choose exactly one of --gsh / --empirical");

    DensityEstimate est;
    if (gsh) {
        if (zeros_path.empty()) throw InvalidArgumentError("--gsh needs --zeros");
        manifest.add_input(zeros_path);
        auto zs = load_zeros(zeros_path);
        if (zs.modulus_k != k)
            throw DataError("zero file modulus does not match -k");
        CharacterTable table(k);
        est = gsh_density(zs, table, residues, ordering, T, n_samples, common.seed,
                          !no_fejer);
    } else {
        est = empirical_log_density(k, residues, ordering, X, common.sieve_config());
    }

    std::printf("delta_hat=%.6f stderr=%.6f\n", est.delta_hat, est.stderr_est);

    ordered_json j;
    j["k"] = k;
    j["residues"] = residues;
    j["ordering"] = ordering;
    j["method"] = gsh ? "gsh_monte_carlo" : "empirical_logmeasure";
    j[gsh ? "T" : "X"] = est.X_or_T;
    j["n_samples"] = est.samples;
    j["seed"] = est.seed;
    j["delta_hat"] = est.delta_hat;
    j["stderr"] = est.stderr_est;
    if (gsh) {
        j["fejer_weights"] = !no_fejer;
        j["convention"] = est.convention;
    } else {
        j["delta_lower_proxy"] = est.delta_lower;
        j["delta_upper_proxy"] = est.delta_upper;
        j["tie_log_measure"] = est.tie_measure;
    }
    write_json(outs.track(common.path("density_report.json")), j);
    manifest.finished_at = iso8601_now();
    manifest.write(outs.track(common.path("manifest.json")));
    outs.keep = true;
    return 0;
}

// ---------------------------------------------------------------- explicit
int cmd_explicit(const CommonOpts& common, std::uint64_t k,
                 std::vector<std::uint32_t> residues, const std::string& zeros_path,
                 double T, double x_min, double x_max, std::size_t points,
                 bool sieve_overlay, bool plot, bool asymptotic,
                 RunManifest manifest) {
    OutputTracker outs;
    if (residues.size() != 2)
        throw InvalidArgumentError("explicit needs exactly two residues: -r l1,l2");
    manifest.add_input(zeros_path);
    auto zs = load_zeros(zeros_path);
    if (zs.modulus_k != k) throw DataError("zero file modulus does not match -k");
    CharacterTable table(k);
    const auto w = make_residue_weights(table, residues[0], residues[1]);
    const auto kernel = asymptotic ? FKernel::asymptotic : FKernel::quadrature;

    const auto xs = log_spaced(x_min, x_max, points);
    std::vector<double> recon(points);
    for (std::size_t i = 0; i < points; ++i)
        recon[i] = delta_reconstruct(xs[i], w, zs, T, kernel);

    {
        std::ofstream csv(outs.track(common.path("reconstruction.csv")));
        if (!csv) throw IoError("cannot write reconstruction.csv");
        csv << "x,value,T\n";
        for (std::size_t i = 0; i < points; ++i) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", xs[i], recon[i], T);
            csv << buf;
        }
    }

    std::vector<double> sieved;
    if (sieve_overlay) {
        RaceOptions opts;
        for (double x : xs)
            opts.probe_xs.push_back(static_cast<std::uint64_t>(std::floor(x)));
        auto st = run_race(k, residues, static_cast<std::uint64_t>(std::ceil(x_max)),
                           common.sieve_config(), opts);
        const double phi = static_cast<double>(st.modulus().phi());
        std::ofstream csv(outs.track(common.path("sieved.csv")));
        if (!csv) throw IoError("cannot write sieved.csv");
        csv << "x,value,T\n";
        for (const auto& probe : st.probes()) {
            const double d = phi * (double(probe.counters[0].pi) -
                                    double(probe.counters[1].pi));
            sieved.push_back(d);
            char buf[96];
            std::snprintf(buf, sizeof buf, "%llu,%.10g,0\n",
                          static_cast<unsigned long long>(probe.x), d);
            csv << buf;
        }
    }

    // oscillation report from the same zero data
    const auto report = make_oscillation_report(w, zs, T, 1, 1, {});
    ordered_json j;
    j["k"] = k;
    j["l1"] = residues[0];
    j["l2"] = residues[1];
    j["T"] = T;
    j["a0"] = report.a0;
    j["diamond_lower_N1_m1"] = report.bounds.lower;
    j["diamond_upper_N1_m1"] = report.bounds.upper;
    auto& terms = j["largest_terms"] = ordered_json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(10, report.terms.size()); ++i)
        terms.push_back({{"gamma", report.terms[i].gamma},
                         {"abs_a", std::abs(report.terms[i].a)}});
    write_json(outs.track(common.path("oscillation_report.json")), j);

    if (plot) {
        std::vector<SvgSeries> series;
        SvgSeries r{"reconstruction (T=" + std::to_string(static_cast<long>(T)) + ")",
                    "#d62728", {}};
        for (std::size_t i = 0; i < points; ++i) r.points.emplace_back(xs[i], recon[i]);
        series.push_back(std::move(r));
        if (!sieved.empty()) {
            SvgSeries s{"sieve", "#1f77b4", {}};
            for (std::size_t i = 0; i < points; ++i)
                s.points.emplace_back(xs[i], sieved[i]);
            series.push_back(std::move(s));
        }
        write_svg_lineplot(outs.track(common.path("overlay.svg")),
                           "phi(k) Delta(x) reconstruction vs sieve", series,
                           /*log_x=*/true);
    }

    manifest.finished_at = iso8601_now();
    manifest.write(outs.track(common.path("manifest.json")));
    outs.keep = true;
    return 0;
}

// ------------------------------------------------------------ independence
int cmd_independence(const CommonOpts& common, const std::string& zeros_path,
                     std::vector<std::uint64_t> subset_1based, int N, double tol,
                     RunManifest manifest) {
    OutputTracker outs;
    manifest.add_input(zeros_path);
    auto zs = load_zeros(zeros_path);
    std::vector<std::size_t> subset;
    for (auto i : subset_1based) {
        if (i == 0) throw InvalidArgumentError("--subset indices are 1-based");
        subset.push_back(static_cast<std::size_t>(i - 1));
    }
    if (tol <= 0) tol = 1e-9 * std::max(1.0, zs.max_gamma());
    const auto verdict = n_independence(zs, subset, N, tol);

    std::printf("passed=%s violations=%zu checked=%llu\n",
                verdict.passed ? "true" : "false", verdict.violations.size(),
                static_cast<unsigned long long>(verdict.combinations_checked));

    ordered_json j;
    j["subset_1based"] = subset_1based;
    j["N"] = verdict.bound_N;
    j["tolerance"] = verdict.tolerance;
    j["combinations_checked"] = verdict.combinations_checked;
    j["passed"] = verdict.passed;
    auto& viols = j["violations"] = ordered_json::array();
    for (const auto& v : verdict.violations)
        viols.push_back({{"coefficients", v.coefficients},
                         {"sum", v.sum},
                         {"nearest", v.nearest},
                         {"distance", v.distance}});
    write_json(outs.track(common.path("independence_verdict.json")), j);
    manifest.finished_at = iso8601_now();
    manifest.write(outs.track(common.path("manifest.json")));
    outs.keep = true;
    return 0;
}

// ---------------------------------------------------------------- barrier
int cmd_barrier(const CommonOpts& common, const std::string& builtin,
                const std::string& spec_path, double sigma, double t_ord,
                std::vector<std::uint32_t> ordering, double x_min, double x_max,
                std::uint64_t samples, double phase_step, bool census,
                RunManifest manifest) {
    OutputTracker outs;
    BarrierSpec spec;
    if (!builtin.empty()) {
        if (builtin != "k5") throw InvalidArgumentError("unknown builtin spec: " + builtin);
        spec = builtin_k5(sigma, t_ord);
    } else if (!spec_path.empty()) {
        manifest.add_input(spec_path);
        spec = load_barrier(spec_path);
    } else {
        throw InvalidArgumentError("need --builtin or --spec");
    }
    CharacterTable table(spec.k);
    spec.validate(table);

    ordered_json j;
    j["k"] = spec.k;
    j["residues"] = spec.residues;
    j["beta1"] = spec.beta1;
    j["beta2"] = spec.beta2;
    j["beta3"] = spec.beta3;
    j["constants"] = {spec.error_C, spec.error_Cprime};

    if (spec.k == 5) {
        const auto phase = k5_phase_inequality(phase_step);
        j["phase_inequality"] = {{"grid_max", phase.grid_max},
                                 {"worst_theta", phase.worst_theta},
                                 {"lipschitz_slack", phase.slack},
                                 {"certified", phase.certified}};
    }

    bool inconclusive = false;
    if (!ordering.empty()) {
        const auto verdict =
            verify_exclusion(spec, table, ordering, x_min, x_max, samples);
        inconclusive = verdict.inconclusive;
        std::printf("passed=%s inconclusive=%s margin=%.6g\n",
                    verdict.passed ? "true" : "false",
                    verdict.inconclusive ? "true" : "false", verdict.margin);
        j["verdict"] = {{"ordering", verdict.ordering},
                        {"x_min", verdict.x_min},
                        {"x_max", verdict.x_max},
                        {"samples", verdict.samples},
                        {"passed", verdict.passed},
                        {"inconclusive", verdict.inconclusive},
                        {"margin", verdict.margin},
                        {"x_threshold", verdict.x_threshold},
                        {"decile_margins", verdict.decile_margins},
                        {"background_ratio_at_xmax", verdict.background_ratio_at_xmax}};
    }

    if (census) {
        const auto c = orderings_census(spec, table, x_min, x_max, samples);
        auto& jc = j["census"] = ordered_json::array();
        for (const auto& [perm, count] : c)
            jc.push_back({{"ordering", perm}, {"count", count}});
    }

    write_json(outs.track(common.path("barrier_verdict.json")), j);
    manifest.finished_at = iso8601_now();
    manifest.write(outs.track(common.path("manifest.json")));
    outs.keep = true;
    return inconclusive ? 5 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"comparative prime-number races, explicit formulas, and barriers"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; flags override");

    CommonOpts common;

    // race
    auto* race = app.add_subcommand("race", "run a prime race and log its events");
    std::uint64_t k = 4, limit = 1000000;
    std::vector<std::uint32_t> residues;
    std::string checkpoint;
    std::uint64_t checkpoint_every = 1024;
    bool resume = false;
    race->add_option("-k,--modulus", k, "race modulus")->required();
    race->add_option("-r,--residues", residues, "tracked residues, comma separated")
        ->required()
        ->delimiter(',');
    race->add_option("-x,--limit", limit, "race up to this x")->required();
    race->add_option("--checkpoint", checkpoint, "checkpoint file for resumable runs");
    race->add_option("--checkpoint-every", checkpoint_every,
                     "segments between checkpoints");
    race->add_flag("--resume", resume, "resume from --checkpoint");
    common.attach(race);

    // chebyshev
    auto* cheb = app.add_subcommand("chebyshev",
                                    "weighted sum over odd primes of "
                                    "(-1)^((p-1)/2) e^(-p/x)");
    double cheb_x = 1000.0;
    std::uint64_t cheb_limit = 1000000;
    cheb->add_option("-x,--x", cheb_x, "scale parameter")->required();
    cheb->add_option("--limit", cheb_limit, "summation limit (>= 41 x)")->required();
    common.attach(cheb);

    // density
    auto* dens = app.add_subcommand("density", "logarithmic density of a race ordering");
    std::uint64_t dk = 4, dn = 100000, dX = 1000000;
    std::vector<std::uint32_t> dres, dord;
    std::string dzeros;
    double dT = 10000.0;
    bool gsh = false, empirical = false, no_fejer = false;
    dens->add_option("-k,--modulus", dk)->required();
    dens->add_option("-r,--residues", dres)->required()->delimiter(',');
    dens->add_option("--ordering", dord, "strict ordering to measure (default: as given)")
        ->delimiter(',');
    dens->add_flag("--gsh", gsh, "Monte Carlo under the sampled limit law");
    dens->add_flag("--empirical", empirical, "exact log measure over [2,X] by sieving");
    dens->add_option("--zeros", dzeros, "zero table (for --gsh)");
    dens->add_option("-T,--height", dT, "truncation height (for --gsh)");
    dens->add_option("-n,--samples", dn, "Monte Carlo samples");
    dens->add_option("-X,--limit", dX, "sieve limit (for --empirical)");
    dens->add_flag("--no-fejer", no_fejer, "disable (1 - gamma/T) weights");
    common.attach(dens);

    // explicit
    auto* expl = app.add_subcommand("explicit",
                                    "reconstruct phi(k) Delta(x) from zeros");
    std::uint64_t ek = 4;
    std::vector<std::uint32_t> eres;
    std::string ezeros;
    double eT = 10000.0, ex_min = 1000.0, ex_max = 1000000.0;
    std::size_t epoints = 100;
    bool overlay = false, plot = false, asymptotic = false;
    expl->add_option("-k,--modulus", ek)->required();
    expl->add_option("-r,--residues", eres, "pair l1,l2")->required()->delimiter(',');
    expl->add_option("--zeros", ezeros, "zero table")->required();
    expl->add_option("-T,--height", eT, "truncation height");
    expl->add_option("--x-min", ex_min);
    expl->add_option("--x-max", ex_max);
    expl->add_option("--points", epoints, "log-spaced sample count");
    expl->add_flag("--sieve-overlay", overlay, "also sieve and emit the true deltas");
    expl->add_flag("--plot", plot, "emit an SVG overlay");
    expl->add_flag("--asymptotic", asymptotic,
                   "use the x^rho/(rho log x) kernel without the integral term");
    common.attach(expl);

    // independence
    auto* indep = app.add_subcommand("independence",
                                     "Diamond N-independence of zero ordinates");
    std::string izeros;
    std::vector<std::uint64_t> isubset;
    int iN = 1;
    double itol = 0.0;
    indep->add_option("--zeros", izeros, "zero table")->required();
    indep->add_option("--subset", isubset,
                      "1-based indices into the merged ordinate list")
        ->required()
        ->delimiter(',');
    indep->add_option("-N,--bound", iN, "coefficient bound")->required();
    indep->add_option("--tol", itol, "tolerance (default 1e-9 max gamma)");
    common.attach(indep);

    // barrier
    auto* barr = app.add_subcommand("barrier",
                                    "hypothetical off-line zero systems and "
                                    "ordering exclusions");
    std::string builtin, spec_path;
    double sigma = 0.75, t_ord = 1e6, bx_min = 1e10, bx_max = 1e30, phase_step = 1e-4;
    std::vector<std::uint32_t> check_ordering;
    std::uint64_t bsamples = 1000;
    bool census = false;
    barr->add_option("--builtin", builtin, "built-in spec name (k5)");
    barr->add_option("--spec", spec_path, "barrier spec file");
    barr->add_option("--sigma", sigma, "built-in: zero real part");
    barr->add_option("--t", t_ord, "built-in: zero ordinate");
    barr->add_option("--check-ordering", check_ordering, "ordering to test")
        ->delimiter(',');
    barr->add_option("--x-min", bx_min);
    barr->add_option("--x-max", bx_max);
    barr->add_option("--samples", bsamples, "log-spaced x samples");
    barr->add_option("--phase-step", phase_step, "k5 phase-inequality grid step");
    barr->add_flag("--census", census, "tally visited orderings of the main-term model");
    common.attach(barr);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunManifest manifest =
            make_manifest(app.get_subcommands().front()->get_name(), argc, argv,
                          common.seed);
        if (race->parsed())
            return cmd_race(common, k, residues, limit, checkpoint, checkpoint_every,
                            resume, std::move(manifest));
        if (cheb->parsed())
            return cmd_chebyshev(common, cheb_x, cheb_limit, std::move(manifest));
        if (dens->parsed())
            return cmd_density(common, dk, dres, dord, gsh, empirical, dzeros, dT, dn,
                               dX, no_fejer, std::move(manifest));
        if (expl->parsed())
            return cmd_explicit(common, ek, eres, ezeros, eT, ex_min, ex_max, epoints,
                                overlay, plot, asymptotic, std::move(manifest));
        if (indep->parsed())
            return cmd_independence(common, izeros, isubset, iN, itol,
                                    std::move(manifest));
        if (barr->parsed())
            return cmd_barrier(common, builtin, spec_path, sigma, t_ord,
                               check_ordering, bx_min, bx_max, bsamples, phase_step,
                               census, std::move(manifest));
        return 2;
    } catch (const InvalidArgumentError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
