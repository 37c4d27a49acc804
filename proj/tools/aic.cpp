// aic: geospatially tessellated epidemic simulator with super-agent
// coarse-graining. Subcommands: gen-city, tessellate, simulate, sweep,
// bench, report.

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "aic/engine.hpp"
#include "aic/metrics.hpp"

using namespace aic;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitPartial = 4;

void info(const std::string& msg) {
    if (log_level() != LogLevel::quiet) std::cout << msg << '\n';
}

City load_or_generate_city(const ScenarioConfig& cfg) {
    if (!cfg.city_dir.empty()) return City::load(cfg.city_dir);
    return generate_synthetic_city(*cfg.synth);
}

std::map<PoiCategory, u32> parse_poi_counts(const std::string& spec) {
    std::map<PoiCategory, u32> out;
    std::istringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--pois expects category=count[,category=count...]");
        out[category_from_name(item.substr(0, eq))] = u32(std::stoul(item.substr(eq + 1)));
    }
    return out;
}

u64 fnv1a(const std::string& data) {
    u64 h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SimError("cannot read " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------

int cmd_gen_city(const std::string& out_dir, u32 grid, i64 pop, u64 seed,
                 const std::string& poi_spec) {
    SynthCityParams params;
    params.grid_size = grid;
    params.population = pop;
    params.seed = seed;
    if (!poi_spec.empty()) params.pois_by_category = parse_poi_counts(poi_spec);
    City city = generate_synthetic_city(params);
    fs::create_directories(out_dir);
    city.save(out_dir);

    std::cout << "city written to " << out_dir << '\n';
    std::cout << "  nodes " << city.graph.nodes.size() << ", edges " << city.graph.edges.size()
              << ", cbgs " << city.cbgs.size() << ", pattern rows " << city.patterns.entries.size()
              << '\n';
    std::array<u32, kPoiCategories> counts{};
    for (const Poi& p : city.pois) ++counts[int(p.category)];
    for (int c = 0; c < kPoiCategories; ++c)
        if (counts[c])
            std::cout << "  poi " << category_name(PoiCategory(c)) << ": " << counts[c] << '\n';
    return kExitOk;
}

int cmd_tessellate(const std::string& city_dir, const std::string& kind_name, u64 seed,
                   unsigned workers, double resolution, const std::string& out_file,
                   const std::string& pixel_map_file) {
    City city = City::load(city_dir);
    TessKind kind = tess_kind_from_name(kind_name);
    Tessellation cbg = build_cbg_tessellation(city);
    build_cell_schedules(city.patterns, cbg, cbg);
    Tessellation tess =
        build_tessellation_variant(city, cbg, kind, seed, workers, resolution);
    if (!out_file.empty()) export_tessellation(tess, city, out_file);
    if (!pixel_map_file.empty())
        save_pixel_map(rasterize(tess, city.graph, resolution), pixel_map_file);

    double mass = 0.0;
    std::size_t nodes = 0;
    for (const Cell& c : tess.cells) {
        mass += c.schedule.total();
        nodes += c.member_nodes.size();
    }
    std::cout << tess_kind_name(kind) << ": " << tess.n_cells() << " cells over " << nodes
              << " nodes (cbg count " << cbg.n_cells() << "), schedule mass " << mass << '\n';
    return kExitOk;
}

int cmd_simulate(const std::string& scenario_file, const std::string& out_dir, int workers_flag,
                 double fraction_flag, const std::string& kind_flag, i64 seed_flag) {
    ScenarioConfig cfg = ScenarioConfig::load(scenario_file);
    if (workers_flag > 0) cfg.workers = unsigned(workers_flag);
    if (fraction_flag > 0.0) cfg.fraction = fraction_flag;
    if (!kind_flag.empty()) cfg.tessellation = tess_kind_from_name(kind_flag);
    if (seed_flag >= 0) cfg.seed = u64(seed_flag);
    City city = load_or_generate_city(cfg);
    SimSetup setup = build_setup(city, cfg, cfg.workers);
    RunOutput out = run_scenario(setup);
    fs::create_directories(out_dir);
    out.write(out_dir);
    info("simulated " + std::to_string(cfg.days) + " days: " +
         std::to_string(out.meta.events) + " events, " + std::to_string(out.meta.infections) +
         " infections, " + std::to_string(out.meta.wall_seconds) + " s, peak rss " +
         std::to_string(out.meta.peak_memory_bytes / (1024 * 1024)) + " MiB");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

struct MetricSamples {
    // [metric] -> fraction -> per-replication values
    std::array<std::map<double, std::vector<double>>, kMetricKinds> values;

    void add(MetricKind m, double fraction, int rep, double v) {
        auto& vec = values[int(m)][fraction];
        if (vec.size() <= std::size_t(rep)) vec.resize(std::size_t(rep) + 1, -1.0);
        vec[std::size_t(rep)] = v;
    }
};

std::string scenario_row(const std::string& tess, double fraction, int rep,
                         const std::string& metric, const std::string& poi, double value) {
    std::ostringstream out;
    out << "synthetic," << tess << ',' << fraction << ',' << rep << ',' << metric << ',' << poi
        << ',' << value << '\n';
    return out.str();
}

int cmd_sweep(const std::string& scenario_file, const std::string& kinds_flag,
              const std::string& fractions_flag, int reps, i64 seed_flag, bool ablate_sa,
              unsigned rep_workers, const std::string& out_dir) {
    ScenarioConfig base = ScenarioConfig::load(scenario_file);
    if (seed_flag >= 0) base.seed = u64(seed_flag);
    if (reps < 1) throw ConfigError("--reps must be >= 1");

    std::vector<TessKind> kinds;
    {
        std::istringstream ss(kinds_flag);
        std::string item;
        while (std::getline(ss, item, ',')) kinds.push_back(tess_kind_from_name(item));
    }
    if (kinds.empty()) throw ConfigError("--kinds must name at least one tessellation");
    std::vector<double> fractions;
    {
        std::istringstream ss(fractions_flag);
        std::string item;
        while (std::getline(ss, item, ',')) fractions.push_back(std::stod(item));
    }
    if (fractions.empty()) fractions = {0.75, 0.5, 0.25, 0.1};

    City city = load_or_generate_city(base);
    SimSetup setup = build_setup(city, base, rep_workers);
    u32 mvpoi = select_mvpoi(city.patterns, city.pois);
    auto [cbg1, cbg2] = select_top_source_cbgs(city.patterns, mvpoi, city.cbgs);
    Window window{0, u32(std::min(7, base.days)) * 1440};
    info("sweep: mvpoi " + city.pois[mvpoi].id + ", source cbgs " + city.cbgs[cbg1].id + "/" +
         city.cbgs[cbg2].id);

    fs::create_directories(out_dir);
    std::ofstream metrics_csv(out_dir + "/metrics.csv");
    metrics_csv << "scenario,tessellation,fraction,replication,metric,poi_id,value\n";

    // NT reference always runs, at 1.0 and at every requested fraction
    std::map<TessKind, MetricSamples> with_sa, without_sa;
    std::vector<std::string> failures;

    auto run_grid = [&](TessKind kind, double fraction, bool use_sa, MetricSamples& sink) {
        SimSetup s = setup;
        s.cfg.tessellation = kind;
        RunParams rp;
        rp.fraction = fraction;
        rp.use_sa = use_sa;
        rp.workers = 1;
        std::string label = std::string(tess_kind_name(kind)) + (use_sa ? "" : "_nosa");
        try {
            run_replications(s, rp, reps, base.seed, rep_workers, [&](int rep, RunOutput&& out) {
                auto visits = extract_visits(out);
                double nov_v = double(nov(visits, mvpoi, window));
                sink.add(MetricKind::NOV, fraction, rep, nov_v);
                metrics_csv << scenario_row(label, fraction, rep, "NOV", city.pois[mvpoi].id,
                                            nov_v);
                if (auto a = avd(visits, mvpoi, window)) {
                    sink.add(MetricKind::AVD, fraction, rep, *a);
                    metrics_csv << scenario_row(label, fraction, rep, "AVD", city.pois[mvpoi].id,
                                                *a);
                }
                if (auto p = pcv(visits, mvpoi, cbg1, cbg2, window)) {
                    sink.add(MetricKind::PCV, fraction, rep, *p);
                    metrics_csv << scenario_row(label, fraction, rep, "PCV", city.pois[mvpoi].id,
                                                *p);
                }
            });
        } catch (const std::exception& e) {
            failures.push_back(label + "@" + std::to_string(fraction) + ": " + e.what());
        }
    };

    std::vector<double> nt_fractions = fractions;
    if (std::find(nt_fractions.begin(), nt_fractions.end(), 1.0) == nt_fractions.end())
        nt_fractions.push_back(1.0);
    for (double f : nt_fractions) run_grid(TessKind::NT, f, true, with_sa[TessKind::NT]);
    for (TessKind kind : kinds) {
        if (kind == TessKind::NT) continue;
        for (double f : fractions) {
            run_grid(kind, f, true, with_sa[kind]);
            if (ablate_sa) run_grid(kind, f, false, without_sa[kind]);
        }
    }

    // errors.csv: per tessellation and metric, per-fraction error vs NT plus
    // the aggregate over the agent-reduction grid
    {
        std::ofstream err(out_dir + "/errors.csv");
        err << "tessellation,metric";
        for (double f : fractions) err << ",f" << f;
        err << ",aggregate\n";
        for (TessKind kind : kinds) {
            for (int m = 0; m < kMetricKinds; ++m) {
                const auto& nt_samples = with_sa[TessKind::NT].values[m];
                const auto& t_samples =
                    kind == TessKind::NT ? nt_samples : with_sa[kind].values[m];
                try {
                    ErrorReport r = aggregate_abs_error(t_samples, nt_samples, fractions);
                    err << tess_kind_name(kind) << ',' << metric_name(MetricKind(m));
                    for (double f : fractions) err << ',' << r.per_fraction[f];
                    err << ',' << r.aggregate << '\n';
                } catch (const std::exception& e) {
                    failures.push_back(std::string("errors:") + tess_kind_name(kind) + "/" +
                                       metric_name(MetricKind(m)) + ": " + e.what());
                }
            }
        }
    }

    // tau.csv: super-agent contribution per tessellation x metric x fraction
    if (ablate_sa) {
        std::ofstream tau(out_dir + "/tau.csv");
        tau << "tessellation,metric,fraction,tau\n";
        for (TessKind kind : kinds) {
            if (kind == TessKind::NT) continue;
            for (int m = 0; m < kMetricKinds; ++m) {
                auto nt_ref = with_sa[TessKind::NT].values[m].find(1.0);
                if (nt_ref == with_sa[TessKind::NT].values[m].end()) continue;
                double nt_mean = mean_of(nt_ref->second);
                for (double f : fractions) {
                    auto ws = with_sa[kind].values[m].find(f);
                    auto ns = without_sa[kind].values[m].find(f);
                    if (ws == with_sa[kind].values[m].end() ||
                        ns == without_sa[kind].values[m].end())
                        continue;
                    auto t = sa_contribution(nt_mean, mean_of(ws->second), mean_of(ns->second));
                    tau << tess_kind_name(kind) << ',' << metric_name(MetricKind(m)) << ',' << f
                        << ',' << (t ? std::to_string(*t) : "undefined") << '\n';
                }
            }
        }
    }

    // histograms.json: Freedman-Diaconis bins from the NT samples, shared
    {
        nlohmann::json h;
        for (int m = 0; m < kMetricKinds; ++m) {
            std::vector<double> reference;
            for (const auto& [f, v] : with_sa[TessKind::NT].values[m])
                reference.insert(reference.end(), v.begin(), v.end());
            if (reference.empty()) continue;
            HistogramSpec spec = freedman_diaconis(reference);
            nlohmann::json hm;
            hm["lo"] = spec.lo;
            hm["width"] = spec.width;
            hm["bins"] = spec.bins;
            nlohmann::json scen = nlohmann::json::object();
            auto add = [&](const std::string& label, const std::vector<double>& v) {
                scen[label] = histogram(v, spec);
            };
            for (const auto& [kind, samples] : with_sa)
                for (const auto& [f, v] : samples.values[m])
                    add(std::string(tess_kind_name(kind)) + "@" + std::to_string(f), v);
            hm["scenarios"] = scen;
            h[metric_name(MetricKind(m))] = hm;
        }
        std::ofstream(out_dir + "/histograms.json") << h.dump(2) << '\n';
    }

    // convergence verdict per metric on the NT reference replications
    {
        std::ofstream conv(out_dir + "/convergence.csv");
        conv << "tessellation,fraction,metric,n_star,converged\n";
        for (const auto& [kind, samples] : with_sa) {
            for (int m = 0; m < kMetricKinds; ++m) {
                for (const auto& [f, v] : samples.values[m]) {
                    if (v.size() < 10) continue;
                    ConvergenceResult r = convergence_check(v);
                    conv << tess_kind_name(kind) << ',' << f << ',' << metric_name(MetricKind(m))
                         << ',' << r.n_star << ',' << (r.converged ? "yes" : "no") << '\n';
                }
            }
        }
    }

    if (!failures.empty()) {
        for (const auto& f : failures) std::cerr << "sweep failure: " << f << '\n';
        return kExitPartial;
    }
    info("sweep artifacts in " + out_dir);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bench: one child process per row so peak memory is attributable

int cmd_bench(const std::string& scenario_file, const std::string& workers_flag,
              const std::string& fractions_flag, const std::string& kinds_flag,
              const std::string& out_file) {
    std::vector<unsigned> workers;
    {
        std::istringstream ss(workers_flag);
        std::string item;
        while (std::getline(ss, item, ',')) workers.push_back(unsigned(std::stoul(item)));
    }
    if (workers.empty()) workers = {1, 2, 4, 8, 14, 16};
    std::vector<double> fractions;
    {
        std::istringstream ss(fractions_flag);
        std::string item;
        while (std::getline(ss, item, ',')) fractions.push_back(std::stod(item));
    }
    if (fractions.empty()) fractions = {1.0};
    std::vector<std::string> kinds;
    {
        std::istringstream ss(kinds_flag);
        std::string item;
        while (std::getline(ss, item, ',')) kinds.push_back(item);
    }
    if (kinds.empty()) kinds = {"NT", "VD_r"};

    char exe_buf[4096];
    ssize_t n = readlink("/proc/self/exe", exe_buf, sizeof exe_buf - 1);
    if (n <= 0) throw SimError("cannot resolve own executable path");
    exe_buf[n] = 0;

    std::ofstream out(out_file);
    out << "workers,fraction,tessellation,wall_seconds,peak_memory_bytes,series_hash\n";
    fs::path tmp = fs::temp_directory_path() / ("aic_bench_" + std::to_string(getpid()));
    fs::create_directories(tmp);

    for (const std::string& kind : kinds) {
        for (double fraction : fractions) {
            for (unsigned w : workers) {
                std::string run_dir = (tmp / (kind + "_" + std::to_string(fraction) + "_" +
                                              std::to_string(w)))
                                          .string();
                auto t0 = std::chrono::steady_clock::now();
                pid_t pid = fork();
                if (pid == 0) {
                    std::string w_s = std::to_string(w);
                    std::string f_s = std::to_string(fraction);
                    execl(exe_buf, exe_buf, "simulate", "--scenario", scenario_file.c_str(),
                          "--out", run_dir.c_str(), "--workers", w_s.c_str(), "--fraction",
                          f_s.c_str(), "--kind", kind.c_str(), (char*)nullptr);
                    _exit(127);
                }
                if (pid < 0) throw SimError("fork failed");
                int status = 0;
                rusage ru{};
                wait4(pid, &status, 0, &ru);
                double wall =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
                    throw SimError("bench child failed for " + kind);
                u64 peak = u64(ru.ru_maxrss) * 1024;
                u64 hash = fnv1a(read_all(run_dir + "/series.csv"));
                out << w << ',' << fraction << ',' << kind << ',' << wall << ',' << peak << ','
                    << std::hex << hash << std::dec << '\n';
                info("bench " + kind + " f=" + std::to_string(fraction) + " w=" +
                     std::to_string(w) + ": " + std::to_string(wall) + " s");
            }
        }
    }
    std::error_code ec;
    fs::remove_all(tmp, ec);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// report: human-readable summary of sweep + bench artifacts

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(path);
    if (!in) return rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_report(const std::string& in_dir) {
    auto errors = read_csv(in_dir + "/errors.csv");
    if (errors.size() < 2) throw ConfigError("no errors.csv rows under " + in_dir);

    std::cout << "# sweep report\n\n## aggregate absolute error vs NT\n\n";
    std::cout << "| tessellation | metric | aggregate |\n|---|---|---|\n";
    std::map<std::string, std::map<std::string, double>> agg;  // metric -> tess -> value
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const auto& row = errors[i];
        const std::string& tess = row[0];
        const std::string& metric = row[1];
        double aggregate = std::stod(row.back());
        agg[metric][tess] = aggregate;
        std::cout << "| " << tess << " | " << metric << " | " << aggregate << " |\n";
    }
    std::cout << "\n## per-metric ordering (best first)\n\n";
    for (const auto& [metric, by_tess] : agg) {
        std::vector<std::pair<double, std::string>> order;
        for (const auto& [tess, v] : by_tess) order.emplace_back(v, tess);
        std::sort(order.begin(), order.end());
        std::cout << "- " << metric << ": ";
        for (std::size_t i = 0; i < order.size(); ++i)
            std::cout << (i ? " < " : "") << order[i].second;
        std::cout << '\n';
    }

    auto tau = read_csv(in_dir + "/tau.csv");
    if (tau.size() > 1) {
        std::cout << "\n## super-agent contribution\n\n"
                  << "| tessellation | metric | fraction | tau |\n|---|---|---|---|\n";
        for (std::size_t i = 1; i < tau.size(); ++i)
            std::cout << "| " << tau[i][0] << " | " << tau[i][1] << " | " << tau[i][2] << " | "
                      << tau[i][3] << " |\n";
    }

    auto conv = read_csv(in_dir + "/convergence.csv");
    if (conv.size() > 1) {
        std::cout << "\n## replication convergence\n\n"
                  << "| tessellation | fraction | metric | n* | converged |\n|---|---|---|---|---|\n";
        for (std::size_t i = 1; i < conv.size(); ++i)
            std::cout << "| " << conv[i][0] << " | " << conv[i][1] << " | " << conv[i][2] << " | "
                      << conv[i][3] << " | " << conv[i][4] << " |\n";
    }

    auto bench = read_csv(in_dir + "/bench.csv");
    if (bench.size() > 1) {
        std::cout << "\n## bench\n\n| workers | fraction | tessellation | wall s | peak MiB |\n"
                  << "|---|---|---|---|---|\n";
        for (std::size_t i = 1; i < bench.size(); ++i)
            std::cout << "| " << bench[i][0] << " | " << bench[i][1] << " | " << bench[i][2]
                      << " | " << bench[i][3] << " | "
                      << std::stoull(bench[i][4]) / (1024 * 1024) << " |\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"agent-in-cell epidemic simulator"};
    app.require_subcommand(1);

    // gen-city
    auto* gen = app.add_subcommand("gen-city", "generate a synthetic city");
    u32 grid = 20;
    i64 pop = 50000;
    i64 seed = 1;
    std::string out_dir = "city";
    std::string poi_spec;
    gen->add_option("--grid", grid, "grid side length (nodes)");
    gen->add_option("--pop", pop, "population");
    gen->add_option("--seed", seed, "generation seed");
    gen->add_option("--out", out_dir, "output directory");
    gen->add_option("--pois", poi_spec, "per-category POI counts, e.g. grocery_retail=12");

    // tessellate
    auto* tes = app.add_subcommand("tessellate", "build a tessellation over a city");
    std::string city_dir = "city";
    std::string kind = "CBG";
    std::string tess_out = "tessellation.jsonl";
    std::string pixel_out;
    unsigned workers = 1;
    double resolution = kDefaultRasterResolution;
    tes->add_option("--city-dir", city_dir, "city directory");
    tes->add_option("--kind", kind, "tessellation kind");
    tes->add_option("--seed", seed, "seed for randomized kinds");
    tes->add_option("--workers", workers, "parallel workers");
    tes->add_option("--resolution", resolution, "raster meters per pixel");
    tes->add_option("--out", tess_out, "tessellation JSONL output");
    tes->add_option("--pixel-map", pixel_out, "optional pixel map output");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run one scenario");
    std::string scenario = "scenario.json";
    std::string run_out = "run";
    int workers_flag = 0;
    double fraction_flag = 0.0;
    std::string kind_flag;
    i64 seed_flag = -1;
    sim->add_option("--scenario", scenario, "scenario JSON")->required();
    sim->add_option("--out", run_out, "output directory");
    sim->add_option("--workers", workers_flag, "override worker count");
    sim->add_option("--fraction", fraction_flag, "override agent fraction");
    sim->add_option("--kind", kind_flag, "override tessellation kind");
    sim->add_option("--seed", seed_flag, "override seed");

    // sweep
    auto* swp = app.add_subcommand("sweep", "tessellation x fraction x replication grid");
    std::string kinds_flag = "CBG,VD_r,CBGVD";
    std::string fractions_flag = "0.75,0.5,0.25,0.1";
    int reps = 5;
    bool ablate = false;
    unsigned rep_workers = 1;
    std::string sweep_out = "sweep";
    swp->add_option("--scenario", scenario, "scenario JSON")->required();
    swp->add_option("--kinds", kinds_flag, "comma-separated tessellation kinds");
    swp->add_option("--fractions", fractions_flag, "comma-separated agent fractions");
    swp->add_option("--reps", reps, "replications per grid point");
    swp->add_option("--seed", seed_flag, "base seed override");
    swp->add_flag("--ablate-sa", ablate, "also run without super-agents for tau");
    swp->add_option("--rep-workers", rep_workers, "replications run concurrently");
    swp->add_option("--out", sweep_out, "output directory");

    // bench
    auto* ben = app.add_subcommand("bench", "runtime and memory grid");
    std::string bench_workers = "1,2,4,8,14,16";
    std::string bench_fractions = "1.0";
    std::string bench_kinds = "NT,VD_r";
    std::string bench_out = "bench.csv";
    ben->add_option("--scenario", scenario, "scenario JSON")->required();
    ben->add_option("--workers", bench_workers, "worker counts");
    ben->add_option("--fractions", bench_fractions, "agent fractions");
    ben->add_option("--kinds", bench_kinds, "tessellation kinds");
    ben->add_option("--out", bench_out, "bench CSV output");

    // report
    auto* rep = app.add_subcommand("report", "summarize sweep/bench artifacts");
    std::string report_in = "sweep";
    rep->add_option("--in", report_in, "artifact directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen_city(out_dir, grid, pop, u64(seed), poi_spec);
        if (tes->parsed())
            return cmd_tessellate(city_dir, kind, u64(seed), workers, resolution, tess_out,
                                  pixel_out);
        if (sim->parsed())
            return cmd_simulate(scenario, run_out, workers_flag, fraction_flag, kind_flag,
                                seed_flag);
        if (swp->parsed())
            return cmd_sweep(scenario, kinds_flag, fractions_flag, reps, seed_flag, ablate,
                             rep_workers, sweep_out);
        if (ben->parsed())
            return cmd_bench(scenario, bench_workers, bench_fractions, bench_kinds, bench_out);
        if (rep->parsed()) return cmd_report(report_in);
    } catch (const ParseError& e) {
        std::cerr << "error (parse): " << e.what() << '\n';
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << "error (validation): " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error (config): " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
