// Copyright 2026 The sdlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 success, 1 usage or input error,
// 2 when a computed result fails its own verification.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdlab/io.hpp"
#include "sdlab/memory.hpp"
#include "sdlab/pistar.hpp"
#include "sdlab/star.hpp"

namespace sdlab::cli {

enum class Format { Json, Csv };

struct RunConfig {
    std::string subcommand;
    std::string function = "and";  ///< and | xor | table
    std::vector<int> table;        ///< used when function == "table"
    int n = 2;
    int bases = 2;
    std::string bases_file;
    std::optional<double> prior_q;
    std::string mode = "explicit";  ///< srm | explicit | certify
    bool adversarial = false;
    std::string problem_file, povm_file, certificate_file;
    double tol = 1e-8;
    std::string output;  ///< file, or directory for reproduce-all; empty means stdout
    Format format = Format::Json;
    std::uint64_t seed = 0;
    bool timing = false;
};

struct ResultRow {
    std::string scenario;
    int n = 0;
    int m = 0;
    double value = 0;
    std::optional<double> bound;
    std::string method;
    std::optional<double> gap;
    double runtime_ms = 0;
};

/// Rounds to 12 significant digits so printed tables are stable across platforms.
inline double round12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

inline std::string fmt12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string csv_header() { return "scenario,n,m,value,bound,method,gap,runtime_ms\n"; }

inline std::string to_csv(const ResultRow& r) {
    std::ostringstream s;
    s << r.scenario << ',' << r.n << ',' << r.m << ',' << fmt12(r.value) << ','
      << (r.bound ? fmt12(*r.bound) : std::string()) << ',' << r.method << ',' << (r.gap ? fmt12(*r.gap) : std::string())
      << ',' << fmt12(r.runtime_ms) << '\n';
    return s.str();
}

// ---------------------------------------------------------------------------
// Reproduction tables.

enum class Check { Eq, Le, Ge };

struct ReproRow {
    std::string scenario;
    int n = 0;
    int m = 0;
    double computed = 0;
    double expected = 0;
    Check check = Check::Eq;
    double tol = 1e-9;
    std::string method;
    std::optional<double> gap;

    bool pass() const {
        if (!std::isfinite(computed)) return false;
        switch (check) {
            case Check::Eq: return std::abs(computed - expected) <= tol;
            case Check::Le: return computed <= expected + tol;
            case Check::Ge: return computed >= expected - tol;
        }
        return false;
    }
};

struct ReproTable {
    std::string file;
    std::vector<ReproRow> rows;
};

inline std::string to_csv(const ReproTable& t) {
    std::ostringstream s;
    s << "scenario,n,m,computed,expected,check,method,gap,pass\n";
    for (const auto& r : t.rows) {
        static const char* names[] = {"eq", "le", "ge"};
        s << r.scenario << ',' << r.n << ',' << r.m << ',' << fmt12(r.computed) << ',' << fmt12(r.expected) << ','
          << names[static_cast<int>(r.check)] << ',' << r.method << ',' << (r.gap ? fmt12(*r.gap) : std::string()) << ','
          << (r.pass() ? "pass" : "fail") << '\n';
    }
    return s.str();
}

namespace detail {

inline FunctionSpec identity_function() {
    const int table[] = {0, 1};
    return table_function(1, table);
}

inline double purity_of_difference(const Ensemble& e) {
    const CMatrix diff = averaged_state(e, 0) - averaged_state(e, 1);
    return trace_of_product(diff, diff).real();
}

inline Ensemble ensemble_for(const FunctionSpec& f, int m) {
    return build_ensemble(f, qubit_tensor_bases(m, f.n), standard_prior(f, m));
}

}  // namespace detail

inline ReproTable table_helstrom() {
    ReproTable t{"helstrom_single_qubit.csv", {}};
    for (int m : {2, 3}) {
        const Ensemble e = detail::ensemble_for(detail::identity_function(), m);
        const double v = helstrom(0.5, averaged_state(e, 0), averaged_state(e, 1)).value;
        t.rows.push_back({"single_qubit_mub", 1, m, v, 0.5 + 0.5 / std::sqrt(static_cast<double>(m)), Check::Eq, 1e-9,
                          "helstrom"});
    }
    return t;
}

inline ReproTable table_universal_bound(std::uint64_t seed) {
    ReproTable t{"star_universal_bound.csv", {}};
    std::mt19937_64 rng(seed);
    for (int n = 1; n <= 4; ++n) {
        std::vector<FunctionSpec> sample;
        for (int i = 0; i < 50; ++i) sample.push_back(random_balanced_function(n, rng));
        for (int m : {2, 3}) {
            double worst_value = 0, worst_purity = 0, purity_at_worst = 0;
            const double purity = 4.0 / (std::ldexp(1.0, n) * m);
            for (const auto& f : sample) {
                const Ensemble e = detail::ensemble_for(f, m);
                worst_value = std::max(worst_value, helstrom(0.5, averaged_state(e, 0), averaged_state(e, 1)).value);
                const double p = detail::purity_of_difference(e);
                if (std::abs(p - purity) >= worst_purity) {
                    worst_purity = std::abs(p - purity);
                    purity_at_worst = p;
                }
            }
            t.rows.push_back({"max_helstrom_random_balanced", n, m, worst_value, boolean_star_upper_bound(n, m),
                              Check::Le, 1e-8, "helstrom"});
            t.rows.push_back({"difference_purity", n, m, purity_at_worst, purity, Check::Eq, 1e-9, "explicit"});
        }
    }
    return t;
}

inline ReproTable table_star_and() {
    ReproTable t{"star_and.csv", {}};
    for (int n = 1; n <= kStarMaxBits; ++n) {
        const Ensemble e = standard_ensemble(FunctionKind::And, n, 2);
        const double v = helstrom(0.5, averaged_state(e, 0), averaged_state(e, 1)).value;
        t.rows.push_back({"star_and", n, 2, v, and_star_closed_form(n), Check::Eq, 1e-8, "helstrom"});
    }
    return t;
}

inline ReproTable table_star_xor() {
    ReproTable t{"star_xor.csv", {}};
    for (int m : {2, 3})
        for (int n = 1; n <= kXorStateMaxBits; ++n)
            t.rows.push_back({"star_xor", n, m, 0.5 * (1 + 0.5 * xor_trace_distance(n, m)), xor_star_closed_form(n, m),
                              Check::Eq, 1e-8, "helstrom"});
    for (int m : {2, 3})
        for (int n = 1; n <= 4; ++n)
            t.rows.push_back({"trace_distance_step_two", n, m, xor_trace_distance(n + 2, m), xor_trace_distance(n, m),
                              Check::Eq, 1e-8, "explicit"});
    return t;
}

inline ReproTable table_xor_prior() {
    ReproTable t{"xor_prior.csv", {}};
    double best_q = 0, best = 2;
    for (int i = 0; i <= 60; ++i) {
        const double q = i / 60.0;
        const double v = xor_two_bit_prior(q, 3);
        if (v < best - 1e-12) {
            best = v;
            best_q = q;
        }
    }
    t.rows.push_back({"grid_argmin_q", 2, 3, best_q, 1.0 / 3, Check::Eq, 1e-9, "helstrom"});
    t.rows.push_back({"grid_min_value", 2, 3, best, 2.0 / 3, Check::Eq, 1e-9, "helstrom"});
    t.rows.push_back({"uniform_prior_value", 2, 3, xor_two_bit_prior(0.5, 3), 0.75, Check::Eq, 1e-9, "helstrom"});
    return t;
}

inline ReproTable table_srm() {
    ReproTable t{"srm.csv", {}};
    struct Case {
        std::string name;
        FunctionSpec f;
        int m;
        double floor;
    };
    const std::vector<Case> cases = {
        {"srm_identity", detail::identity_function(), 2, 0.85},
        {"srm_xor", boolean_function(FunctionKind::Xor, 2), 2, 0.85},
        {"srm_identity", detail::identity_function(), 3, 7.0 / 9},
        {"srm_xor", boolean_function(FunctionKind::Xor, 2), 3, 7.0 / 9},
    };
    for (const auto& c : cases) {
        const Ensemble e = detail::ensemble_for(c.f, c.m);
        const SrmBuild b = srm_build(e);
        const double v = strategy_value(e, b.strategy);
        t.rows.push_back({c.name, c.f.n, c.m, v, c.floor, Check::Ge, 1e-9, "srm"});
        t.rows.push_back({c.name + "_above_guessing", c.f.n, c.m, v, guessing_bound(c.m, 2), Check::Ge, 0, "srm"});
        const double resid = (b.components.s - b.components.c_m * CMatrix::identity(e.dim())).max_abs();
        t.rows.push_back({c.name + "_s_minus_cI", c.f.n, c.m, resid, 0, Check::Le, 1e-8, "srm"});
    }
    for (int m : {2, 3})
        t.rows.push_back({"srm_formula_vs_g", 0, m, srm_bound_formula(m, 2), srm_bound_from_g(m, 2), Check::Eq, 1e-12,
                          "closed_form"});
    return t;
}

inline ReproTable table_pistar_and() {
    ReproTable t{"pistar_and.csv", {}};
    for (int n = 1; n <= kAndMaxBits; ++n) {
        const Ensemble e = and_ensemble(n);
        const AndMeasurement meas = and_pistar_measurement_with_parts(n);
        const double v = strategy_value(e, meas.strategy);
        const double exact = and_pistar_value(n);
        const DualCertificate cert = and_pistar_certificate(n);
        const CertReport rep = verify_certificate(pi0_problem(e), to_povm(meas.strategy), cert, 1e-8);
        t.rows.push_back({"pistar_and_explicit", n, 2, v, exact, Check::Eq, 1e-9, "explicit", rep.gap});
        t.rows.push_back({"pistar_and_certificate_slack", n, 2, rep.min_slack, 0, Check::Ge, 1e-8, "certificate"});
        t.rows.push_back({"pistar_and_certificate_gap", n, 2, std::abs(rep.gap), 0, Check::Le, 1e-8, "certificate"});
        t.rows.push_back({"pistar_and_eta", n, 2, meas.parts.eta, and_eta_formula(n), Check::Eq, 1e-10,
                          "closed_form"});
        const double star = and_star_closed_form(n);
        if (n == 1)
            t.rows.push_back({"pistar_equals_star_single_bit", n, 2, v, star, Check::Eq, 1e-9, "explicit"});
        else
            t.rows.push_back({"pistar_improvement_over_star", n, 2, v - star,
                              1 / (2 * (std::ldexp(1.0, n) + std::pow(2.0, n / 2.0) - 2)), Check::Eq, 1e-10,
                              "explicit"});
    }
    return t;
}

inline ReproTable table_pistar_xor() {
    ReproTable t{"pistar_xor.csv", {}};
    for (int m : {2, 3}) {
        for (int n = 2; n <= kXorMaxBits; n += 2) {
            const double v = strategy_value(xor_ensemble(n, m), xor_bell_strategy(n, m));
            t.rows.push_back({"xor_even_bell", n, m, v, 1, Check::Eq, 1e-10, "explicit"});
            t.rows.push_back({"xor_even_gap_over_star", n, m, v - xor_star_closed_form(n, m), 0.25, Check::Eq, 1e-10,
                              "explicit"});
        }
        const double p = 0.5 * (1 + 1 / std::sqrt(static_cast<double>(m)));
        for (int n = 1; n <= 7; n += 2) {
            const Ensemble e = xor_ensemble(n, m);
            const StrategyPI0 s = xor_odd_strategy(n, m);
            const DualCertificate cert = xor_pistar_certificate(n, m);
            const CertReport rep = verify_certificate(pi0_problem(e), to_povm(s), cert, 1e-8);
            t.rows.push_back({"xor_odd_certificate_value", n, m, cert.claimed_value, p, Check::Eq, 1e-9, "certificate"});
            t.rows.push_back({"xor_odd_certificate_slack", n, m, rep.min_slack, 0, Check::Ge, 1e-8, "certificate"});
            t.rows.push_back({"xor_odd_strategy", n, m, rep.primal_value, p, Check::Eq, 1e-8, "explicit", rep.gap});
        }
    }
    return t;
}

inline ReproTable table_one_qubit(std::uint64_t seed) {
    ReproTable t{"one_qubit_memory.csv", {}};
    auto add = [&](const std::string& name, const FunctionSpec& f, const CMatrix& u) {
        t.rows.push_back({name, f.n, 2, one_qubit_protocol_sim(f, u), 1, Check::Eq, 1e-9, "explicit"});
        const auto [p00, p01] = support_pair(f, u);
        const BlockDecomposition dec = two_projector_blocks(p00, p01);
        t.rows.push_back({name + "_max_block", f.n, 2, static_cast<double>(dec.min_memory_dim), 2, Check::Le, 0,
                          "explicit"});
        t.rows.push_back({name + "_posterior_overlap", f.n, 2, posterior_overlap(f, u, dec), 0, Check::Le, 1e-8,
                          "explicit"});
    };
    for (int n = 2; n <= 4; ++n) {
        const CMatrix h = tensor_power(gates::hadamard(), static_cast<std::size_t>(n));
        add("and_hadamard", boolean_function(FunctionKind::And, n), h);
        add("xor_hadamard", boolean_function(FunctionKind::Xor, n), h);
    }
    std::mt19937_64 rng(seed + 1);
    for (int i = 0; i < 25; ++i) {
        const int n = 2 + i % 3;
        const FunctionSpec f = random_balanced_function(n, rng);
        add("random_balanced_hadamard", f, tensor_power(gates::hadamard(), static_cast<std::size_t>(n)));
        add("random_balanced_random_unitary", f, random_unitary(f.size(), rng));
    }
    return t;
}

inline ReproTable table_three_basis(std::uint64_t seed) {
    ReproTable t{"three_basis_memory.csv", {}};
    std::mt19937_64 rng(seed + 2);
    for (int n = 2; n <= 3; ++n) {
        const std::vector<std::pair<std::string, FunctionSpec>> fs = {
            {"xor", boolean_function(FunctionKind::Xor, n)}, {"random_balanced", random_balanced_function(n, rng)}};
        for (const auto& [name, f] : fs) {
            const AdversarialBases ab = adversarial_bases(f);
            const ProjectorFamily fam = family_from_bases(f, {CMatrix::identity(f.size()), ab.u1, ab.u2});
            const double d = static_cast<double>(f.size());
            t.rows.push_back({name + "_conditions", n, 3, adversarial_condition_error(ab), 0, Check::Le, 1e-9,
                              "explicit"});
            t.rows.push_back({name + "_commutant_dim", n, 3, static_cast<double>(commutant_basis(fam).size()), 1,
                              Check::Eq, 0, "explicit"});
            t.rows.push_back({name + "_min_memory_dim", n, 3,
                              static_cast<double>(decompose_algebra(fam, seed).min_memory_dim), d, Check::Eq, 0,
                              "explicit"});
            t.rows.push_back({name + "_partial_strategy", n, 3, partial_strategy_value(f, ab), 5.0 / 6, Check::Eq,
                              1e-9, "explicit"});
        }
    }
    return t;
}

inline ReproTable table_solver() {
    ReproTable t{"solver.csv", {}};
    for (int m : {2, 3}) {
        const Ensemble e = detail::ensemble_for(detail::identity_function(), m);
        const SolveResult r = solve_discrimination(two_state_problem(0.5, averaged_state(e, 0), averaged_state(e, 1)));
        t.rows.push_back({"solver_single_qubit_mub", 1, m, r.value, 0.5 + 0.5 / std::sqrt(static_cast<double>(m)),
                          Check::Eq, 1e-5, "sdp"});
        t.rows.push_back({"solver_single_qubit_mub_slack", 1, m, r.certificate_slack, 0, Check::Ge, 1e-5, "sdp"});
    }
    for (int n = 1; n <= 2; ++n) {
        const SolveResult r = solve_discrimination(pi0_problem(and_ensemble(n)));
        t.rows.push_back({"solver_pistar_and", n, 2, r.value, and_pistar_value(n), Check::Eq, 1e-5, "sdp"});
        t.rows.push_back({"solver_pistar_and_slack", n, 2, r.certificate_slack, 0, Check::Ge, 1e-5, "sdp"});
    }
    return t;
}

struct ReproSummary {
    std::vector<ReproTable> tables;
    std::vector<double> runtime_ms;

    bool all_pass() const {
        for (const auto& t : tables)
            for (const auto& r : t.rows)
                if (!r.pass()) return false;
        return true;
    }
};

/// Computes every reproduction table in a fixed order.
inline ReproSummary compute_reproduction(std::uint64_t seed = 0) {
    const std::vector<std::function<ReproTable()>> jobs = {
        table_helstrom,
        [seed] { return table_universal_bound(seed); },
        table_star_and,
        table_star_xor,
        table_xor_prior,
        table_srm,
        table_pistar_and,
        table_pistar_xor,
        [seed] { return table_one_qubit(seed); },
        [seed] { return table_three_basis(seed); },
        table_solver,
    };
    ReproSummary s;
    for (const auto& job : jobs) {
        const auto t0 = std::chrono::steady_clock::now();
        s.tables.push_back(job());
        s.runtime_ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    return s;
}

/// Writes one CSV per table plus summary.csv; timings.csv only when requested
/// since it is the one output that varies between runs.
inline ReproSummary reproduce_all(const std::string& dir, std::uint64_t seed = 0, bool timing = false) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec && fs::is_directory(dir), ErrorKind::Io, "cannot create output directory " + dir);
    const std::string probe = (fs::path(dir) / ".sdlab_write_probe").string();
    io::write_text_file(probe, "");
    fs::remove(probe, ec);

    ReproSummary s = compute_reproduction(seed);
    std::ostringstream summary;
    summary << "file,rows,passed,pass\n";
    std::ostringstream timings;
    timings << "file,runtime_ms\n";
    for (std::size_t i = 0; i < s.tables.size(); ++i) {
        const auto& t = s.tables[i];
        io::write_text_file((fs::path(dir) / t.file).string(), to_csv(t));
        std::size_t passed = 0;
        for (const auto& r : t.rows) passed += r.pass() ? 1 : 0;
        summary << t.file << ',' << t.rows.size() << ',' << passed << ',' << (passed == t.rows.size() ? "pass" : "fail")
                << '\n';
        timings << t.file << ',' << fmt12(s.runtime_ms[i]) << '\n';
    }
    io::write_text_file((fs::path(dir) / "summary.csv").string(), summary.str());
    if (timing) io::write_text_file((fs::path(dir) / "timings.csv").string(), timings.str());
    return s;
}

// ---------------------------------------------------------------------------
// Subcommands.

namespace detail {

inline FunctionSpec function_from(const RunConfig& cfg) {
    if (cfg.function == "and") return boolean_function(FunctionKind::And, cfg.n);
    if (cfg.function == "xor") return boolean_function(FunctionKind::Xor, cfg.n);
    if (cfg.function == "table") return table_function(cfg.n, cfg.table);
    fail(ErrorKind::Usage, "unknown function '" + cfg.function + "' (and, xor, table)");
}

inline void require_qubit_bases(int m) {
    require(m == 2 || m == 3, ErrorKind::Usage, "--bases must be 2 or 3");
}

struct Emitted {
    io::json json;
    std::optional<ResultRow> row;
    bool verified = true;
};

inline Emitted run_star(const RunConfig& cfg) {
    require_qubit_bases(cfg.bases);
    const FunctionSpec f = function_from(cfg);
    const int m = cfg.bases;
    StarResult r;
    if (cfg.prior_q) {
        require(cfg.function == "xor" && cfg.n == 2, ErrorKind::Usage, "--prior-q applies to two-bit XOR only");
        r.value = xor_two_bit_prior(*cfg.prior_q, m);
        r.method = Method::Helstrom;
    } else if (cfg.function == "xor") {
        r = xor_star_optimum(cfg.n, m);
    } else if (cfg.function == "and" && m == 2) {
        r = and_star_optimum(cfg.n);
    } else {
        const Ensemble e = ensemble_for(f, m);
        if (f.num_outputs == 2) {
            double q = 0;
            for (auto x : f.preimage(0)) q += e.prior.p_x[x];
            r = helstrom(q, averaged_state(e, 0), averaged_state(e, 1));
        } else {
            std::vector<Term> terms;
            for (int y = 0; y < f.num_outputs; ++y) {
                double py = 0;
                for (auto x : f.preimage(y)) py += e.prior.p_x[x];
                terms.push_back({std::to_string(y), py, averaged_state(e, y)});
            }
            const SolveResult s = solve_discrimination(make_problem(std::move(terms)));
            require(s.certified, ErrorKind::VerificationFailure, "solver could not certify its optimum");
            r.value = s.value;
            r.method = Method::Sdp;
        }
    }
    Emitted out;
    std::optional<double> bound;
    bool check = true;
    if (f.is_balanced && f.num_outputs == 2 && !cfg.prior_q) {
        bound = boolean_star_upper_bound(cfg.n, m);
        check = r.value <= *bound + 1e-8;
    } else {
        bound = guessing_bound(m, f.num_outputs);
        check = r.value >= *bound - 1e-8 || cfg.prior_q.has_value();
    }
    out.verified = check && r.value >= -1e-12 && r.value <= 1 + 1e-12;
    out.json = {{"value", round12(r.value)},
                {"method", to_string(r.method)},
                {"bound", round12(*bound)},
                {"bound_check", check}};
    out.row = ResultRow{"star_" + cfg.function, cfg.n, m, r.value, bound, to_string(r.method), std::nullopt, 0};
    return out;
}

inline Emitted run_pistar(const RunConfig& cfg) {
    require_qubit_bases(cfg.bases);
    const FunctionSpec f = function_from(cfg);
    const int m = cfg.bases;
    require(cfg.mode == "srm" || cfg.mode == "explicit" || cfg.mode == "certify", ErrorKind::Usage,
            "--mode must be srm, explicit or certify");
    const Ensemble e = ensemble_for(f, m);
    Emitted out;
    double value = 0;
    double bound = 0;
    Method method = Method::Explicit;
    std::optional<CertReport> report;
    StrategyPI0 strategy;

    if (cfg.mode == "srm") {
        const SrmBuild b = srm_build(e);
        strategy = b.strategy;
        value = strategy_value(e, strategy);
        bound = m <= 3 ? srm_bound_formula(m, f.num_outputs) : srm_bound_from_g(m, f.num_outputs);
        method = Method::Srm;
        out.verified = value >= bound - 1e-8;
    } else {
        std::optional<DualCertificate> cert;
        if (cfg.function == "and") {
            require(m == 2, ErrorKind::Usage, "the explicit AND measurement uses two bases");
            strategy = and_pistar_measurement(cfg.n);
            bound = and_pistar_value(cfg.n);
            cert = and_pistar_certificate(cfg.n);
        } else if (cfg.function == "xor" && cfg.n % 2 == 0) {
            strategy = xor_bell_strategy(cfg.n, m);
            bound = 1;
            cert = strategy_dual_candidate(e, strategy);
        } else if (cfg.function == "xor") {
            strategy = xor_odd_strategy(cfg.n, m);
            cert = xor_pistar_certificate(cfg.n, m);
            bound = cert->claimed_value;
        } else {
            const SolveResult s = solve_discrimination(pi0_problem(e));
            strategy = StrategyPI0{m, f.num_outputs, {}};
            for (const auto& el : s.povm.elements) strategy.elements.push_back(el.op);
            method = Method::Sdp;
            cert = strategy_dual_candidate(e, strategy);
            bound = cert->claimed_value;
        }
        value = strategy_value(e, strategy);
        out.verified = std::abs(value - bound) <= (method == Method::Sdp ? 1e-5 : 1e-8);
        if (cfg.mode == "certify") {
            report = verify_certificate(pi0_problem(e), to_povm(strategy), *cert,
                                        method == Method::Sdp ? 1e-5 : cfg.tol);
            out.verified = out.verified && report->feasible && report->gap >= -cfg.tol &&
                           report->gap <= (method == Method::Sdp ? 1e-5 : cfg.tol);
            if (method != Method::Sdp) method = Method::Certificate;
        }
    }
    out.json = {{"value", round12(value)}, {"bound", round12(bound)}, {"method", to_string(method)}};
    out.json["certificate"] = report ? io::json{{"feasible", report->feasible},
                                                {"gap", round12(report->gap)},
                                                {"min_slack", round12(report->min_slack)}}
                                     : io::json(nullptr);
    out.row = ResultRow{"pistar_" + cfg.function + "_" + cfg.mode, cfg.n, m, value, bound, to_string(method),
                        report ? std::optional<double>(report->gap) : std::nullopt, 0};
    return out;
}

inline Emitted run_memory(const RunConfig& cfg, std::ostream& err) {
    require(cfg.format == Format::Json, ErrorKind::Usage, "memory emits JSON only");
    FunctionSpec f = function_from(cfg);
    std::vector<CMatrix> unitaries;
    std::string function_used = cfg.function;
    if (cfg.adversarial) {
        require(cfg.bases_file.empty(), ErrorKind::Usage, "--adversarial and --bases-file are exclusive");
        if (!f.is_balanced) {
            // The three-basis construction pairs f^-1(0) with f^-1(1); fall back to parity.
            err << "note: " << cfg.function << " is not balanced; using xor on " << cfg.n << " bits\n";
            f = boolean_function(FunctionKind::Xor, cfg.n);
            function_used = "xor";
        }
        const AdversarialBases ab = adversarial_bases(f);
        unitaries = {CMatrix::identity(f.size()), ab.u1, ab.u2};
    } else if (!cfg.bases_file.empty()) {
        unitaries = io::bases_from_json(io::read_json_file(cfg.bases_file));
    } else {
        require_qubit_bases(cfg.bases);
        unitaries = qubit_tensor_bases(cfg.bases, cfg.n).unitaries;
    }
    for (const auto& u : unitaries) require(is_unitary(u, 1e-9), ErrorKind::NotUnitary, "basis is not unitary");
    const ProjectorFamily fam = family_from_bases(f, unitaries);
    const auto commutant = commutant_basis(fam);
    const BlockDecomposition dec = decompose_algebra(fam, cfg.seed);
    Emitted out;
    out.verified = decomposition_violation(dec, fam).empty();
    io::json blocks = io::json::array();
    for (const auto& b : dec.blocks) blocks.push_back({b.dim_j, b.dim_k});
    int qubits = 0;
    while ((std::size_t{1} << qubits) < dec.min_memory_dim) ++qubits;
    out.json = {{"function", function_used},
                {"n", cfg.n},
                {"bases", unitaries.size()},
                {"min_memory_dim", dec.min_memory_dim},
                {"min_memory_qubits", qubits},
                {"block_dims", std::move(blocks)},
                {"commutant_dim", commutant.size()}};
    return out;
}

inline Emitted run_certify(const RunConfig& cfg) {
    require(cfg.format == Format::Json, ErrorKind::Usage, "certify emits JSON only");
    require(!cfg.problem_file.empty() && !cfg.povm_file.empty() && !cfg.certificate_file.empty(), ErrorKind::Usage,
            "certify needs --problem, --povm and --certificate");
    const DiscriminationProblem problem = io::problem_from_json(io::read_json_file(cfg.problem_file));
    const Povm povm = io::povm_from_json(io::read_json_file(cfg.povm_file));
    const DualCertificate cert = io::certificate_from_json(io::read_json_file(cfg.certificate_file));
    const std::string why = povm_violation(povm, 1e-9);
    require(why.empty(), ErrorKind::VerificationFailure, "POVM: " + why);
    const CertReport rep = verify_certificate(problem, povm, cert, cfg.tol);
    Emitted out;
    out.verified = rep.feasible && rep.gap >= -cfg.tol;
    out.json = io::to_json(rep);
    return out;
}

inline void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.output.empty())
        out << text;
    else
        io::write_text_file(cfg.output, text);
}

}  // namespace detail

inline int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::VerificationFailure:
        case ErrorKind::NoConvergence:
        case ErrorKind::NumericalRankAmbiguity: return 2;
        default: return 1;
    }
}

/// Runs one configured command, writing results to `out` (or cfg.output) and
/// diagnostics to `err`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.subcommand == "reproduce-all") {
            require(!cfg.output.empty(), ErrorKind::Usage, "reproduce-all needs --output-dir");
            const ReproSummary s = reproduce_all(cfg.output, cfg.seed, cfg.timing);
            std::size_t rows = 0, passed = 0;
            for (const auto& t : s.tables)
                for (const auto& r : t.rows) {
                    ++rows;
                    if (r.pass()) ++passed;
                    else err << "FAIL " << t.file << ": " << r.scenario << " n=" << r.n << " m=" << r.m << '\n';
                }
            out << passed << '/' << rows << " rows pass\n";
            return s.all_pass() ? 0 : 2;
        }
        detail::Emitted e;
        const auto t0 = std::chrono::steady_clock::now();
        if (cfg.subcommand == "star") e = detail::run_star(cfg);
        else if (cfg.subcommand == "pistar") e = detail::run_pistar(cfg);
        else if (cfg.subcommand == "memory") e = detail::run_memory(cfg, err);
        else if (cfg.subcommand == "certify") e = detail::run_certify(cfg);
        else fail(ErrorKind::Usage, "unknown subcommand '" + cfg.subcommand + "'");
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

        std::string text;
        if (cfg.format == Format::Csv) {
            require(e.row.has_value(), ErrorKind::Usage, "this subcommand has no CSV form");
            ResultRow row = *e.row;
            row.runtime_ms = cfg.timing ? ms : 0;
            text = csv_header() + to_csv(row);
        } else {
            if (cfg.timing) e.json["runtime_ms"] = ms;
            text = e.json.dump(2) + "\n";
        }
        detail::emit(cfg, text, out);
        if (!e.verified) {
            err << "verification failed\n";
            return 2;
        }
        return 0;
    } catch (const Error& ex) {
        err << "error: " << ex.what() << '\n';
        return exit_code_for(ex.kind());
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return 1;
    }
}

/// Parses argv into a RunConfig. Returns an exit code when parsing ends the
/// program (help or a usage error).
inline std::optional<int> parse_args(int argc, const char* const* argv, RunConfig& cfg, std::ostream& out,
                                     std::ostream& err) {
    CLI::App app{"Numerical lab for state discrimination with post-measurement information", "sdlab"};
    app.require_subcommand(1);
    std::string format = "json";
    std::string table_json;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--function", cfg.function, "and, xor or table")->check(CLI::IsMember({"and", "xor", "table"}));
        sub->add_option("--table", table_json, "truth table as a JSON array, with --function table");
        sub->add_option("--n", cfg.n, "number of input bits")->check(CLI::Range(1, kMaxInputBits));
        sub->add_option("--bases", cfg.bases, "number of qubit MUBs (2 or 3)");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--output", cfg.output, "output file (default stdout)");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_flag("--timing", cfg.timing, "include wall-clock runtimes");
    };
    auto* star = app.add_subcommand("star", "discrimination without post-measurement information");
    add_common(star);
    star->add_option("--prior-q", cfg.prior_q, "P(f = 0) for two-bit XOR")->check(CLI::Range(0.0, 1.0));
    auto* pistar = app.add_subcommand("pistar", "discrimination with the basis announced afterwards");
    add_common(pistar);
    pistar->add_option("--mode", cfg.mode, "srm, explicit or certify")
        ->check(CLI::IsMember({"srm", "explicit", "certify"}));
    pistar->add_option("--tol", cfg.tol, "certificate tolerance");
    auto* memory = app.add_subcommand("memory", "minimal quantum memory for perfect prediction");
    add_common(memory);
    memory->add_option("--bases-file", cfg.bases_file, "JSON list of basis unitaries");
    memory->add_flag("--adversarial", cfg.adversarial, "use the three-basis full-memory construction");
    auto* certify = app.add_subcommand("certify", "check a dual certificate against a POVM");
    certify->add_option("--problem", cfg.problem_file, "problem JSON")->required();
    certify->add_option("--povm", cfg.povm_file, "POVM JSON")->required();
    certify->add_option("--certificate", cfg.certificate_file, "certificate JSON")->required();
    certify->add_option("--tol", cfg.tol, "feasibility tolerance");
    certify->add_option("--output", cfg.output, "output file (default stdout)");
    auto* repro = app.add_subcommand("reproduce-all", "recompute every reference table");
    repro->add_option("--output-dir", cfg.output, "directory for the CSV tables")->required();
    repro->add_option("--seed", cfg.seed, "random seed");
    repro->add_flag("--timing", cfg.timing, "also write timings.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.format = format == "csv" ? Format::Csv : Format::Json;
    if (!table_json.empty()) {
        try {
            cfg.table = io::json::parse(table_json).get<std::vector<int>>();
        } catch (const io::json::exception& e) {
            err << "error: --table must be a JSON array of integers\n";
            return 1;
        }
        if (cfg.function != "table") cfg.function = "table";
    }
    if (cfg.function == "table" && cfg.table.empty()) {
        err << "error: --function table needs --table\n";
        return 1;
    }
    return std::nullopt;
}

inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    RunConfig cfg;
    if (auto code = parse_args(argc, argv, cfg, out, err)) return *code;
    return run(cfg, out, err);
}

}  // namespace sdlab::cli
