// sweep.cpp - worker pool over sweep points, CSV output

#include "vibroqfi/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>
#include <tuple>

#include "vibroqfi/cache.hpp"

namespace vibroqfi {

SweepRow run_point(const SweepConfig& cfg, double value, bool use_cache) {
    auto start = std::chrono::steady_clock::now();
    PointSetup s = setup_point(cfg, value);
    SweepRow row;
    row.value = value;
    row.gamma = s.emitter.Gamma;

    const std::string dtag = "d" + parameter_name(s.theta);
    Fingerprint kt = params_fingerprint(s.pulse, s.emitter, s.bath, s.grid, s.rule, "tdm");
    Fingerprint kd = params_fingerprint(s.pulse, s.emitter, s.bath, s.grid, s.rule, dtag);

    TemporalDensityMatrix tdm;
    TdmDerivative d;
    std::optional<TdmCache> cache;
    if (use_cache) cache.emplace(cache_directory(cfg.cache_dir));
    bool hit = false;
    if (cache) {
        auto a = cache->load(kt, s.grid, &row.diagnostics);
        auto b = a ? cache->load(kd, s.grid, &row.diagnostics) : std::nullopt;
        if (a && b) {
            tdm.grid = s.grid;
            tdm.rho = std::move(a->m);
            tdm.p_loss = a->p;
            tdm.fingerprint = kt;
            d.drho = std::move(b->m);
            d.dp_loss = b->p;
            hit = true;
        }
    }
    if (!hit) {
        std::tie(tdm, d) = build_tdm_with_derivative(s.pulse, s.emitter, s.bath, s.grid, s.theta, s.rule);
        if (cache) {
            try {
                cache->store(kt, {s.grid, tdm.rho, tdm.p_loss});
                cache->store(kd, {s.grid, d.drho, d.dp_loss});
            } catch (const std::exception& e) {
                row.diagnostics.push_back(std::string("cache not written: ") + e.what());
            }
        }
    }

    double bound = applicable_bound(s.pulse, s.emitter, s.bath, s.grid, s.theta);
    FisherReport r = fisher_report(tdm, d, s.theta, bound);
    row.qfi = r.qfi;
    row.qfi_bound = r.qfi_bound;
    row.cfi_time = r.cfi_time;
    row.cfi_freq = r.cfi_frequency;
    row.p_loss = r.p_loss;
    row.n = s.grid.n;
    row.window = s.grid.window();
    row.from_cache = hit;
    row.diagnostics.insert(row.diagnostics.end(), r.diagnostics.begin(), r.diagnostics.end());
    row.elapsed_ms = cfg.timing
                         ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()
                         : 0.0;
    return row;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg, const SweepOptions& opt) {
    validate_for_sweep(cfg);
    const std::size_t count = cfg.values.size();
    std::vector<SweepRow> rows(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;

    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                rows[i] = run_point(cfg, cfg.values[i], opt.use_cache);
                if (opt.log) {
                    std::lock_guard lock(log_mutex);
                    *opt.log << cfg.sweep_variable << " = " << cfg.values[i] << ": qfi " << rows[i].qfi
                             << (rows[i].from_cache ? " (cached)" : "") << '\n';
                    for (const auto& dgn : rows[i].diagnostics) *opt.log << "  " << dgn << '\n';
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(count)));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

void write_sweep_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
    os << kSweepHeader << '\n';
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d,%.12g,%.12g\n",
                      cfg.sweep_variable.c_str(), r.value, r.qfi, r.qfi_bound, r.cfi_time, r.cfi_freq, r.p_loss, r.n,
                      r.window, r.elapsed_ms);
        os << buf;
    }
}

void write_sweep_csv(const std::string& path, const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_sweep_csv(os, cfg, rows);
    if (!os) throw std::runtime_error("cannot write " + path);
}

} // namespace vibroqfi
