#pragma once

// Benchmark harness: seeded feasible starts, the calibration method matrix,
// per-run accounting and aggregate statistics, with CSV/JSON output.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ctime>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "ddsv/calib.hpp"
#include "ddsv/errors.hpp"
#include "ddsv/optim/bfgs.hpp"
#include "ddsv/optim/bounds.hpp"
#include "ddsv/optim/feller.hpp"
#include "ddsv/optim/lm.hpp"
#include "ddsv/optim/nelder_mead.hpp"
#include "ddsv/optim/result.hpp"

namespace ddsv {

inline const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> m{"heston-NM", "BFGS", "LM-NUM", "LM-BC-15", "LM-BC-30", "LM-BLEIC",
                                            "LM-BLEIC-NM"};
    return m;
}

/// Upper limits used when drawing starts for components without a finite upper bound.
struct SamplingCaps {
    std::array<double, n_params> upper{0.5, 0.5, 2.0, 0.5, 3.0, 2.0, 1.5, 0.999};
};

struct BenchConfig {
    std::vector<std::string> methods = known_methods();
    std::size_t n_starts = 100;
    std::uint64_t seed = 42;
    Bounds bounds = Bounds::model_defaults();
    SamplingCaps caps;
    double fd_step = 1e-8;
    std::size_t nodes = default_nodes;
    double shift = 0.1;
    double v0 = 1.0;
    std::size_t n_factors = 2;
    LMConfig lm;
    NelderMeadConfig nm;
    BFGSConfig bfgs;
    HybridConfig hybrid;
    std::size_t lm_num_iters = 15;
    std::size_t bleic_iters = 50;
    std::size_t threads = 0;  // 0: hardware concurrency
};

struct RunRecord {
    std::string method;
    std::size_t start = 0;
    std::vector<double> theta0;
    std::vector<double> theta;
    double F = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    std::size_t n_obj_calls = 0;
    std::size_t n_grad_calls = 0;
    double cpu_seconds = 0.0;
    double wall_seconds = 0.0;
    std::string reason;
    bool feller_satisfied = false;
    std::string error;

    bool operator==(const RunRecord&) const = default;
};

struct MethodSummary {
    std::string method;
    std::size_t runs = 0;
    std::size_t failed = 0;
    std::array<double, 5> quantiles{};  // min, Q1, median, Q3, max of final F
    double mean_cpu_seconds = 0.0;
    double mean_wall_seconds = 0.0;
    double mean_obj_calls = 0.0;
    double mean_grad_calls = 0.0;
    double mean_seconds_per_obj_call = 0.0;
    double mean_seconds_per_grad_call = 0.0;
    double feller_violation_pct = 0.0;

    bool operator==(const MethodSummary&) const = default;
};

struct BenchReport {
    std::size_t n_starts = 0;
    std::uint64_t seed = 0;
    std::vector<MethodSummary> methods;
    std::vector<RunRecord> runs;

    bool operator==(const BenchReport&) const = default;
};

// ---------------------------------------------------------------------------
// starts and finite differences

inline std::vector<Eigen::VectorXd> sample_starts(const Bounds& bounds, std::size_t n, std::uint64_t seed,
                                                  const SamplingCaps& caps = {}) {
    if (bounds.size() != static_cast<Eigen::Index>(n_params)) throw ValidationError("bounds must have 8 components");
    std::array<double, n_params> lo{}, hi{};
    for (std::size_t i = 0; i < n_params; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        lo[i] = bounds.lower(ii);
        hi[i] = std::min(bounds.upper(ii), caps.upper[i]);
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i]))
            throw ValidationError(std::string("cannot sample component ") + param_names[i] +
                                  ": needs finite lower bound below the sampling cap");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Eigen::VectorXd> out;
    out.reserve(n);
    std::size_t tries = 0;
    const std::size_t min_tries = 10000;
    while (out.size() < n) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(n_params));
        for (std::size_t i = 0; i < n_params; ++i) x(static_cast<Eigen::Index>(i)) = lo[i] + (hi[i] - lo[i]) * unit(rng);
        ++tries;
        if (bounds.contains(x) && feller_satisfied(x)) out.push_back(x);
        if (tries >= min_tries && static_cast<double>(out.size()) < 1e-4 * static_cast<double>(tries))
            throw ValidationError("start sampling acceptance rate below 1e-4; widen the sampling caps");
    }
    return out;
}

/// Central differences (v(x + h e_i) - v(x - h e_i)) / 2h; one-sided where a
/// bumped point leaves the box. Works for scalar or vector-valued v.
template <class Fn>
Eigen::MatrixXd numerical_jacobian(Fn&& v, const Eigen::VectorXd& x, double h, const Bounds* box = nullptr,
                                   std::size_t* one_sided = nullptr) {
    if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
    Eigen::MatrixXd J;
    Eigen::VectorXd center;
    bool have_center = false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const bool up_ok = !box || xp(i) <= box->upper(i);
        const bool dn_ok = !box || xm(i) >= box->lower(i);
        Eigen::VectorXd col;
        auto as_vec = [](const auto& r) -> Eigen::VectorXd {
            if constexpr (std::is_arithmetic_v<std::decay_t<decltype(r)>>) return Eigen::VectorXd::Constant(1, r);
            else return r;
        };
        if (up_ok && dn_ok) {
            col = (as_vec(v(xp)) - as_vec(v(xm))) / (2.0 * h);
        } else {
            if (!have_center) {
                center = as_vec(v(x));
                have_center = true;
            }
            if (one_sided) ++*one_sided;
            else std::clog << "ddsv: warning: one-sided difference for component " << i << '\n';
            col = up_ok ? Eigen::VectorXd((as_vec(v(xp)) - center) / h) : Eigen::VectorXd((center - as_vec(v(xm))) / h);
        }
        if (J.size() == 0) J.resize(col.size(), x.size());
        J.col(i) = col;
    }
    return J;
}

template <class Fn>
Eigen::VectorXd numerical_gradient(Fn&& v, const Eigen::VectorXd& x, double h, const Bounds* box = nullptr) {
    return numerical_jacobian(v, x, h, box).row(0).transpose();
}

// ---------------------------------------------------------------------------
// single runs

namespace detail {

inline double thread_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

/// Instrumented views of a calibration problem.
struct CountedProblem {
    const CalibProblem& prob;
    std::size_t obj = 0;
    std::size_t grad = 0;

    Eigen::VectorXd residual(const Eigen::VectorXd& x) {
        ++obj;
        return prob.residuals(to_params(x));
    }
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) {
        ++grad;
        return prob.jacobian(to_params(x));
    }
    double penalized(const Eigen::VectorXd& x) {
        ++obj;
        return prob.objective_penalized(to_params(x));
    }
    std::pair<double, Eigen::VectorXd> value_and_gradient(const Eigen::VectorXd& x) {
        ++obj;
        ++grad;
        const auto r = prob.residuals_and_jacobian(to_params(x));
        return {0.5 * r.f.squaredNorm(), r.J.transpose() * r.f};
    }
};

}  // namespace detail

/// Runs one named method from x0. Call counters come from the instrumented wrappers.
inline OptResult run_method(const CalibProblem& prob, const std::string& method, const Eigen::VectorXd& x0,
                            const BenchConfig& cfg) {
    detail::CountedProblem cp{prob};
    auto resid = [&](const Eigen::VectorXd& x) { return cp.residual(x); };
    auto jac = [&](const Eigen::VectorXd& x) { return cp.jacobian(x); };
    auto pen = [&](const Eigen::VectorXd& x) { return cp.penalized(x); };
    const Bounds& box = cfg.bounds;
    OptResult r;
    if (method == "heston-NM") {
        r = nelder_mead(pen, x0, cfg.nm);
    } else if (method == "BFGS") {
        auto fg = [&](const Eigen::VectorXd& x) { return cp.value_and_gradient(x); };
        r = bfgs_bounded(fg, x0, box, cfg.bfgs);
    } else if (method == "LM-NUM") {
        std::size_t one_sided = 0;
        auto fd_jac = [&](const Eigen::VectorXd& x) {
            return numerical_jacobian(resid, x, cfg.fd_step, &box, &one_sided);
        };
        LMConfig c = cfg.lm;
        c.k_max = cfg.lm_num_iters;
        r = lm_bc(resid, fd_jac, x0, box, c);
        if (one_sided > 0)
            std::clog << "ddsv: warning: LM-NUM used " << one_sided << " one-sided differences at the bounds\n";
    } else if (method == "LM-BC-15" || method == "LM-BC-30") {
        LMConfig c = cfg.lm;
        c.k_max = method == "LM-BC-15" ? 15 : 30;
        r = lm_bc(resid, jac, x0, box, c);
    } else if (method == "LM-BLEIC") {
        LMConfig c = cfg.lm;
        c.k_max = cfg.bleic_iters;
        r = lm_bleic(resid, jac, x0, box, c);
    } else if (method == "LM-BLEIC-NM") {
        LMConfig c = cfg.lm;
        c.k_max = cfg.bleic_iters;
        r = lm_bleic_nm(resid, jac, pen, x0, box, c, cfg.hybrid);
    } else {
        throw ValidationError("unknown method '" + method + "'");
    }
    r.n_obj_calls = cp.obj;
    r.n_grad_calls = cp.grad;
    r.feller_satisfied = feller_satisfied(r.x);
    return r;
}

// ---------------------------------------------------------------------------
// aggregation

/// Linear-interpolation sample quantile (R type 7) of sorted data.
inline double quantile_sorted(const std::vector<double>& s, double q) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    const double w = pos - static_cast<double>(lo);
    if (w == 0.0 || s[lo] == s[hi]) return s[lo];
    return s[lo] + w * (s[hi] - s[lo]);
}

inline MethodSummary summarize(const std::string& method, const std::vector<RunRecord>& rows) {
    MethodSummary m;
    m.method = method;
    std::vector<double> F;
    std::size_t violations = 0;
    double obj_rate = 0.0, grad_rate = 0.0;
    for (const auto& r : rows) {
        if (r.method != method) continue;
        ++m.runs;
        if (!r.error.empty()) ++m.failed;
        F.push_back(r.F);
        m.mean_cpu_seconds += r.cpu_seconds;
        m.mean_wall_seconds += r.wall_seconds;
        m.mean_obj_calls += static_cast<double>(r.n_obj_calls);
        m.mean_grad_calls += static_cast<double>(r.n_grad_calls);
        if (r.n_obj_calls > 0) obj_rate += r.cpu_seconds / static_cast<double>(r.n_obj_calls);
        if (r.n_grad_calls > 0) grad_rate += r.cpu_seconds / static_cast<double>(r.n_grad_calls);
        if (!r.feller_satisfied) ++violations;
    }
    if (m.runs == 0) return m;
    const double n = static_cast<double>(m.runs);
    std::sort(F.begin(), F.end());
    const std::array<double, 5> qs{0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t i = 0; i < 5; ++i) m.quantiles[i] = quantile_sorted(F, qs[i]);
    m.mean_cpu_seconds /= n;
    m.mean_wall_seconds /= n;
    m.mean_obj_calls /= n;
    m.mean_grad_calls /= n;
    m.mean_seconds_per_obj_call = obj_rate / n;
    m.mean_seconds_per_grad_call = grad_rate / n;
    m.feller_violation_pct = 100.0 * static_cast<double>(violations) / n;
    return m;
}

inline BenchReport run_matrix(const CalibProblem& prob, const BenchConfig& cfg) {
    if (cfg.methods.empty()) throw ValidationError("no methods selected");
    for (const auto& m : cfg.methods)
        if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
            throw ValidationError("unknown method '" + m + "'");
    if (cfg.n_starts < 1) throw ValidationError("n_starts must be at least 1");
    const auto starts = sample_starts(cfg.bounds, cfg.n_starts, cfg.seed, cfg.caps);

    BenchReport rep;
    rep.n_starts = cfg.n_starts;
    rep.seed = cfg.seed;
    const std::size_t total = cfg.methods.size() * cfg.n_starts;
    rep.runs.resize(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next++; idx < total; idx = next++) {
            const std::size_t mi = idx / cfg.n_starts;
            const std::size_t si = idx % cfg.n_starts;
            RunRecord& row = rep.runs[idx];
            row.method = cfg.methods[mi];
            row.start = si;
            row.theta0.assign(starts[si].data(), starts[si].data() + starts[si].size());
            const auto wall0 = std::chrono::steady_clock::now();
            const double cpu0 = detail::thread_cpu_seconds();
            try {
                const OptResult r = run_method(prob, row.method, starts[si], cfg);
                row.theta.assign(r.x.data(), r.x.data() + r.x.size());
                row.F = r.F;
                row.iterations = r.iterations;
                row.n_obj_calls = r.n_obj_calls;
                row.n_grad_calls = r.n_grad_calls;
                row.reason = to_string(r.reason);
                row.feller_satisfied = r.feller_satisfied;
            } catch (const std::exception& e) {
                row.error = e.what();
                row.reason = "error";
                row.theta = row.theta0;
                row.feller_satisfied = feller_satisfied(starts[si]);
            }
            row.cpu_seconds = detail::thread_cpu_seconds() - cpu0;
            row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        }
    };
    std::size_t nthreads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min(nthreads, total);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& m : cfg.methods) rep.methods.push_back(summarize(m, rep.runs));
    return rep;
}

// ---------------------------------------------------------------------------
// serialization

using json = nlohmann::json;

namespace detail {

inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
inline double num(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace detail

inline void to_json(json& j, const RunRecord& r) {
    j = json{{"method", r.method},           {"start", r.start},
             {"theta0", r.theta0},           {"theta", r.theta},
             {"F", detail::num(r.F)},        {"iterations", r.iterations},
             {"n_obj_calls", r.n_obj_calls}, {"n_grad_calls", r.n_grad_calls},
             {"cpu_seconds", r.cpu_seconds}, {"wall_seconds", r.wall_seconds},
             {"reason", r.reason},           {"feller_satisfied", r.feller_satisfied},
             {"error", r.error}};
}

inline void from_json(const json& j, RunRecord& r) {
    j.at("method").get_to(r.method);
    j.at("start").get_to(r.start);
    j.at("theta0").get_to(r.theta0);
    j.at("theta").get_to(r.theta);
    r.F = detail::num(j.at("F"));
    j.at("iterations").get_to(r.iterations);
    j.at("n_obj_calls").get_to(r.n_obj_calls);
    j.at("n_grad_calls").get_to(r.n_grad_calls);
    j.at("cpu_seconds").get_to(r.cpu_seconds);
    j.at("wall_seconds").get_to(r.wall_seconds);
    j.at("reason").get_to(r.reason);
    j.at("feller_satisfied").get_to(r.feller_satisfied);
    j.at("error").get_to(r.error);
}

inline void to_json(json& j, const MethodSummary& m) {
    json q = json::array();
    for (double v : m.quantiles) q.push_back(detail::num(v));
    j = json{{"method", m.method},
             {"runs", m.runs},
             {"failed", m.failed},
             {"quantiles", q},
             {"mean_cpu_seconds", m.mean_cpu_seconds},
             {"mean_wall_seconds", m.mean_wall_seconds},
             {"mean_obj_calls", m.mean_obj_calls},
             {"mean_grad_calls", m.mean_grad_calls},
             {"mean_seconds_per_obj_call", m.mean_seconds_per_obj_call},
             {"mean_seconds_per_grad_call", m.mean_seconds_per_grad_call},
             {"feller_violation_pct", m.feller_violation_pct}};
}

inline void from_json(const json& j, MethodSummary& m) {
    j.at("method").get_to(m.method);
    j.at("runs").get_to(m.runs);
    j.at("failed").get_to(m.failed);
    const auto& q = j.at("quantiles");
    if (q.size() != 5) throw ValidationError("quantiles must have 5 entries");
    for (std::size_t i = 0; i < 5; ++i) m.quantiles[i] = detail::num(q[i]);
    j.at("mean_cpu_seconds").get_to(m.mean_cpu_seconds);
    j.at("mean_wall_seconds").get_to(m.mean_wall_seconds);
    j.at("mean_obj_calls").get_to(m.mean_obj_calls);
    j.at("mean_grad_calls").get_to(m.mean_grad_calls);
    j.at("mean_seconds_per_obj_call").get_to(m.mean_seconds_per_obj_call);
    j.at("mean_seconds_per_grad_call").get_to(m.mean_seconds_per_grad_call);
    j.at("feller_violation_pct").get_to(m.feller_violation_pct);
}

inline void to_json(json& j, const BenchReport& r) {
    j = json{{"n_starts", r.n_starts}, {"seed", r.seed}, {"methods", r.methods}, {"runs", r.runs}};
}

inline void from_json(const json& j, BenchReport& r) {
    j.at("n_starts").get_to(r.n_starts);
    j.at("seed").get_to(r.seed);
    j.at("methods").get_to(r.methods);
    j.at("runs").get_to(r.runs);
}

/// Reads BenchConfig keys; absent keys keep their defaults.
inline BenchConfig bench_config_from_json(const json& j) {
    BenchConfig c;
    auto opt = [&](const char* key, auto& dst) {
        if (j.contains(key)) j.at(key).get_to(dst);
    };
    opt("methods", c.methods);
    opt("n_starts", c.n_starts);
    opt("seed", c.seed);
    opt("fd_step", c.fd_step);
    opt("nodes", c.nodes);
    opt("shift", c.shift);
    opt("v0", c.v0);
    opt("n_factors", c.n_factors);
    opt("lm_num_iters", c.lm_num_iters);
    opt("bleic_iters", c.bleic_iters);
    opt("threads", c.threads);
    if (j.contains("lower") || j.contains("upper")) {
        auto vec = [&](const char* key, const Eigen::VectorXd& dflt) {
            if (!j.contains(key)) return dflt;
            Eigen::VectorXd v(static_cast<Eigen::Index>(n_params));
            const auto& a = j.at(key);
            if (a.size() != n_params) throw ValidationError(std::string(key) + " must have 8 entries");
            for (std::size_t i = 0; i < n_params; ++i) v(static_cast<Eigen::Index>(i)) = detail::num(a[i]);
            return v;
        };
        c.bounds = Bounds(vec("lower", c.bounds.lower), vec("upper", c.bounds.upper));
    }
    if (j.contains("sampling_caps")) {
        const auto& a = j.at("sampling_caps");
        if (a.size() != n_params) throw ValidationError("sampling_caps must have 8 entries");
        for (std::size_t i = 0; i < n_params; ++i) c.caps.upper[i] = a[i].get<double>();
    }
    if (j.contains("lm")) {
        const auto& l = j.at("lm");
        auto lo = [&](const char* key, auto& dst) {
            if (l.contains(key)) l.at(key).get_to(dst);
        };
        lo("tau", c.lm.tau);
        lo("eps1", c.lm.eps1);
        lo("eps2", c.lm.eps2);
        lo("eps3", c.lm.eps3);
        lo("gamma", c.lm.gamma);
        lo("beta", c.lm.beta);
        lo("sigma", c.lm.sigma);
    }
    if (j.contains("nelder_mead")) {
        const auto& l = j.at("nelder_mead");
        if (l.contains("max_iter")) l.at("max_iter").get_to(c.nm.max_iter);
        if (l.contains("runs")) l.at("runs").get_to(c.nm.runs);
        if (l.contains("tol")) l.at("tol").get_to(c.nm.tol);
    }
    if (j.contains("bfgs") && j.at("bfgs").contains("max_iter")) j.at("bfgs").at("max_iter").get_to(c.bfgs.max_iter);
    if (j.contains("hybrid")) {
        const auto& l = j.at("hybrid");
        if (l.contains("threshold")) l.at("threshold").get_to(c.hybrid.threshold);
        if (l.contains("nm_iters")) l.at("nm_iters").get_to(c.hybrid.nm.max_iter);
    }
    return c;
}

inline BenchReport read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return json::parse(in).get<BenchReport>();
}

inline void write_report(const BenchReport& rep, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
    auto open = [&](const char* name) {
        std::ofstream out(dir / name);
        if (!out) throw Error("cannot write '" + (dir / name).string() + "'");
        out.precision(17);
        return out;
    };
    {
        auto out = open("report.json");
        out << json(rep).dump(2) << '\n';
    }
    auto csv_num = [](double v) {
        if (std::isnan(v)) return std::string("nan");
        if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
        std::ostringstream s;
        s.precision(17);
        s << v;
        return s.str();
    };
    {
        auto out = open("summary.csv");
        out << "method,runs,failed,F_min,F_q1,F_median,F_q3,F_max,mean_cpu_seconds,mean_wall_seconds,"
               "mean_obj_calls,mean_grad_calls,mean_seconds_per_obj_call,mean_seconds_per_grad_call,"
               "feller_violation_pct\n";
        for (const auto& m : rep.methods) {
            out << m.method << ',' << m.runs << ',' << m.failed;
            for (double q : m.quantiles) out << ',' << csv_num(q);
            out << ',' << csv_num(m.mean_cpu_seconds) << ',' << csv_num(m.mean_wall_seconds) << ','
                << csv_num(m.mean_obj_calls) << ',' << csv_num(m.mean_grad_calls) << ','
                << csv_num(m.mean_seconds_per_obj_call) << ',' << csv_num(m.mean_seconds_per_grad_call) << ','
                << csv_num(m.feller_violation_pct) << '\n';
        }
    }
    {
        auto out = open("runs.csv");
        out << "method,start,F,iterations,n_obj_calls,n_grad_calls,cpu_seconds,wall_seconds,reason,feller_satisfied";
        for (const char* p : param_names) out << ",theta0_" << p;
        for (const char* p : param_names) out << ",theta_" << p;
        out << ",error\n";
        for (const auto& r : rep.runs) {
            out << r.method << ',' << r.start << ',' << csv_num(r.F) << ',' << r.iterations << ',' << r.n_obj_calls
                << ',' << r.n_grad_calls << ',' << csv_num(r.cpu_seconds) << ',' << csv_num(r.wall_seconds) << ','
                << r.reason << ',' << (r.feller_satisfied ? 1 : 0);
            for (std::size_t i = 0; i < n_params; ++i) out << ',' << (i < r.theta0.size() ? csv_num(r.theta0[i]) : "");
            for (std::size_t i = 0; i < n_params; ++i) out << ',' << (i < r.theta.size() ? csv_num(r.theta[i]) : "");
            std::string err = r.error;
            std::replace(err.begin(), err.end(), ',', ';');
            std::replace(err.begin(), err.end(), '\n', ' ');
            out << ',' << err << '\n';
        }
    }
    {
        auto out = open("boxplot.csv");
        out << "method,min,q1,median,q3,max\n";
        for (const auto& m : rep.methods) {
            out << m.method;
            for (double q : m.quantiles) out << ',' << csv_num(q);
            out << '\n';
        }
    }
}

}  // namespace ddsv
