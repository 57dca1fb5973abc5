#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chebclust/basis.hpp"
#include "chebclust/clustering.hpp"
#include "chebclust/csv.hpp"
#include "chebclust/document.hpp"
#include "chebclust/envelope.hpp"
#include "chebclust/exchange.hpp"
#include "chebclust/lp.hpp"
#include "chebclust/optimality.hpp"

namespace {

using namespace chebclust;

struct CommonOptions {
    std::string input;
    std::string layout = "wide";
    std::string out;
    std::string trace_out;
    int degree = 0;
    std::string basis = "monomial";
    double tol = kDeviationTolerance;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_basis) {
    cmd->add_option("input", opt.input, "input CSV file")->required();
    cmd->add_option("--layout", opt.layout, "CSV layout: wide or long")
        ->check(CLI::IsMember({"wide", "long"}));
    cmd->add_option("--out", opt.out, "write the machine-readable JSON document here");
    cmd->add_option("--trace-out", opt.trace_out, "write per-grid-point diagnostics CSV here");
    if (with_basis) {
        cmd->add_option("--degree", opt.degree, "prototype degree n")->check(CLI::NonNegativeNumber);
        cmd->add_option("--basis", opt.basis, "function family: monomial or chebyshev")
            ->check(CLI::IsMember({"monomial", "chebyshev"}));
        cmd->add_option("--tol", opt.tol, "deviation tolerance");
    }
}

SignalGroup load(const CommonOptions& opt) {
    return ingest_csv_file(opt.input, opt.layout == "wide" ? CsvLayout::Wide : CsvLayout::Long);
}

ChebyshevBasis make_basis(const CommonOptions& opt, const Grid& grid) {
    if (opt.basis == "chebyshev") {
        return ChebyshevBasis::chebyshev_polynomial(opt.degree, grid.a, grid.b);
    }
    return ChebyshevBasis::monomial(opt.degree);
}

SolverChoice parse_solver(const std::string& name) {
    if (name == "lp") return SolverChoice::Lp;
    if (name == "cross-check") return SolverChoice::CrossCheck;
    return SolverChoice::Exchange;
}

const char* solver_name(SolverChoice choice) {
    switch (choice) {
        case SolverChoice::Lp: return "lp";
        case SolverChoice::CrossCheck: return "cross-check";
        default: return "exchange";
    }
}

InputSummary summarize(const SignalGroup& group) {
    InputSummary s;
    s.n_points = group.grid.size();
    s.t_min = group.grid.a;
    s.t_max = group.grid.b;
    s.n_signals = group.count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fingerprint(group)));
    s.fingerprint = buf;
    return s;
}

CertificateDoc certificate_doc(const OptimalityVerdict& alternation,
                               const OptimalityVerdict& subdifferential) {
    CertificateDoc cert;
    if (alternation.optimal && alternation.kind == CertificateKind::DoublePoint) {
        cert.kind = "double-point";
        cert.double_point = alternation.double_point;
    } else if (alternation.optimal) {
        cert.kind = "alternation";
        cert.nodes = alternation.alternation_nodes;
        cert.signs = alternation.alternation_signs;
    } else if (subdifferential.optimal) {
        cert.kind = "subdifferential";
        cert.nodes = subdifferential.support_indices;
        cert.signs = subdifferential.support_signs;
        cert.weights.assign(subdifferential.weights.data(),
                            subdifferential.weights.data() + subdifferential.weights.size());
    }
    return cert;
}

void emit(const RunDocument& doc, const CommonOptions& opt,
          const std::vector<TraceBlock>& trace, double elapsed) {
    std::cout << to_text(doc, elapsed);
    if (!opt.out.empty()) {
        std::ofstream out(opt.out);
        if (!out) throw ParseError("cannot open output file '" + opt.out + "'");
        out << to_json(doc);
    }
    if (!opt.trace_out.empty()) {
        std::ofstream out(opt.trace_out);
        if (!out) throw ParseError("cannot open trace file '" + opt.trace_out + "'");
        write_trace_csv(out, trace);
    }
}

ClusterResultDoc result_from_prototype(int index, const Prototype& proto,
                                       const std::vector<std::string>& member_ids,
                                       const Envelope& env, const ChebyshevBasis& basis,
                                       double tol, const std::optional<SolveReport>& report) {
    ClusterResultDoc doc;
    doc.cluster = index;
    doc.member_ids = member_ids;
    doc.coeffs.assign(proto.coeffs.data(), proto.coeffs.data() + proto.coeffs.size());
    doc.delta = proto.delta;
    if (report) {
        doc.termination = to_string(report->reason);
        doc.iterations = report->iterations;
        doc.exchanges = report->exchanges;
        doc.warm_start_used = report->warm_start_used;
        doc.warm_start_fallback = report->warm_start_fallback;
    }
    const DeviationProfile profile = deviation_profile(env, basis, proto.coeffs, tol);
    const OptimalityVerdict alternation = check_alternation(profile, basis.degree());
    const OptimalityVerdict subdifferential = check_subdifferential(profile, basis, env.grid);
    doc.alternation_optimal = alternation.optimal;
    doc.subdifferential_optimal = subdifferential.optimal;
    doc.certificate = certificate_doc(alternation, subdifferential);
    return doc;
}

int run_approx(const CommonOptions& opt, const std::string& solver, long max_iter,
               const std::string& mps_out) {
    const auto start = std::chrono::steady_clock::now();
    const SignalGroup group = load(opt);
    const ChebyshevBasis basis = make_basis(opt, group.grid);
    const Envelope env = build_envelope(group);
    const SolverChoice choice = parse_solver(solver);

    std::optional<SolveReport> report;
    Eigen::VectorXd coeffs;
    double delta = 0.0;
    if (choice != SolverChoice::Lp) {
        report = solve_exchange(env, basis, std::nullopt, max_iter, opt.tol);
        coeffs = report->coeffs;
        delta = report->delta;
    }
    if (choice != SolverChoice::Exchange) {
        const LpProblem problem = build_lp(env, basis);
        if (!mps_out.empty()) {
            std::ofstream mps(mps_out);
            if (!mps) throw ParseError("cannot open mps file '" + mps_out + "'");
            write_mps(problem, mps);
        }
        const LpSolution lp = solve_simplex(problem);
        if (lp.status != LpStatus::Optimal) {
            std::cerr << "error: simplex did not reach optimality\n";
            return 1;
        }
        if (report && std::abs(report->delta - lp.objective) > 1e-7) {
            std::cerr << "error: exchange and simplex deviations disagree beyond 1e-7\n";
            return 1;
        }
        if (!report) {
            coeffs = lp.values.head(basis.dimension());
            delta = lp.objective;
        }
    }

    Prototype proto;
    proto.coeffs = coeffs;
    proto.delta = delta;
    if (report) {
        proto.certificate = report->certificate;
        proto.double_point = report->double_point;
    }

    RunDocument doc;
    doc.command = "approx";
    doc.input = summarize(group);
    doc.config = {opt.degree, opt.basis,  solver, 1,    opt.tol,
                  max_iter,   0,          0,      true, opt.layout};
    const LowerBoundResult bound = lower_bound(env, opt.tol);
    doc.band = LowerBoundDoc{bound.delta_star, bound.witnesses};
    doc.clusters.push_back(
        result_from_prototype(0, proto, group.ids, env, basis, opt.tol, report));

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit(doc, opt, {{0, env, basis.evaluate_on_grid(coeffs, env.grid)}}, elapsed);
    return report && report->reason == TerminationReason::IterationLimit ? 1 : 0;
}

int run_cluster(const CommonOptions& opt, const std::string& solver, long max_iter, int k,
                int max_outer, std::uint64_t seed, bool skip_rules) {
    const auto start = std::chrono::steady_clock::now();
    const SignalGroup group = load(opt);

    ClusterConfig config;
    config.k = k;
    config.basis = make_basis(opt, group.grid);
    config.solver = parse_solver(solver);
    config.max_outer = max_outer;
    config.solver_iteration_limit = max_iter;
    config.tol = opt.tol;
    config.seed = seed;
    config.skip_rules = skip_rules;

    const ClusteringState state = k_medoid(group, config);

    RunDocument doc;
    doc.command = "cluster";
    doc.input = summarize(group);
    doc.config = {opt.degree, opt.basis, solver,     k,          opt.tol,
                  max_iter,   max_outer, seed,       skip_rules, opt.layout};
    doc.converged = state.converged;
    doc.outer_iterations = state.outer_iterations;
    doc.sum_delta_log = state.sum_delta_log;
    doc.max_delta_log = state.max_delta_log;
    doc.events = state.events;
    for (int r = 0; r < group.count(); ++r) {
        doc.assignment.emplace_back(group.ids[r], state.assignment[r]);
    }

    std::vector<TraceBlock> trace;
    for (int c = 0; c < k; ++c) {
        if (state.prototypes[c].coeffs.size() == 0) continue;
        std::vector<std::string> member_ids;
        for (int r : state.members[c]) member_ids.push_back(group.ids[r]);
        doc.clusters.push_back(result_from_prototype(c, state.prototypes[c], member_ids,
                                                     state.envelopes[c], config.basis, opt.tol,
                                                     std::nullopt));
        trace.push_back({c, state.envelopes[c], state.prototypes[c].grid_values});
    }

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit(doc, opt, trace, elapsed);
    return state.converged ? 0 : 1;
}

int run_check(const CommonOptions& opt, const std::string& coeffs_text) {
    const auto start = std::chrono::steady_clock::now();
    const SignalGroup group = load(opt);
    const ChebyshevBasis basis = make_basis(opt, group.grid);
    const Envelope env = build_envelope(group);

    std::vector<double> parsed;
    std::stringstream ss(coeffs_text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            parsed.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ParseError("cannot parse coefficient '" + cell + "'");
        }
    }
    if (static_cast<int>(parsed.size()) != basis.dimension()) {
        throw ParseError("expected " + std::to_string(basis.dimension()) +
                         " coefficients, got " + std::to_string(parsed.size()));
    }
    Eigen::VectorXd coeffs(parsed.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) coeffs[i] = parsed[i];

    Prototype proto;
    proto.coeffs = coeffs;
    const DeviationProfile profile = deviation_profile(env, basis, coeffs, opt.tol);
    proto.delta = profile.delta;

    RunDocument doc;
    doc.command = "check";
    doc.input = summarize(group);
    doc.config = {opt.degree, opt.basis, "", 1, opt.tol, 0, 0, 0, true, opt.layout};
    const LowerBoundResult bound = lower_bound(env, opt.tol);
    doc.band = LowerBoundDoc{bound.delta_star, bound.witnesses};
    doc.clusters.push_back(
        result_from_prototype(0, proto, group.ids, env, basis, opt.tol, std::nullopt));

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit(doc, opt, {{0, env, basis.evaluate_on_grid(coeffs, env.grid)}}, elapsed);
    return 0;
}

int run_envelope(const CommonOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    const SignalGroup group = load(opt);
    const Envelope env = build_envelope(group);
    const LowerBoundResult bound = lower_bound(env, opt.tol);

    RunDocument doc;
    doc.command = "envelope";
    doc.input = summarize(group);
    doc.config = {0, "", "", 1, opt.tol, 0, 0, 0, true, opt.layout};
    doc.band = LowerBoundDoc{bound.delta_star, bound.witnesses};

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // The trace prototype column carries the band midline here.
    emit(doc, opt, {{0, env, 0.5 * (env.upper + env.lower)}}, elapsed);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uniform-norm band prototypes and curve clustering"};
    app.require_subcommand(1);

    CommonOptions approx_opt, cluster_opt, check_opt, envelope_opt;
    std::string approx_solver = "exchange", cluster_solver = "exchange";
    long approx_iter = 500, cluster_iter = 500;
    std::string mps_out;
    int k = 2, max_outer = 50;
    std::uint64_t seed = 0;
    bool no_skip = false;
    std::string coeffs_text;

    CLI::App* approx = app.add_subcommand("approx", "fit one prototype to the signal band");
    add_common(approx, approx_opt, true);
    approx->add_option("--solver", approx_solver, "exchange, lp or cross-check")
        ->check(CLI::IsMember({"exchange", "lp", "cross-check"}));
    approx->add_option("--max-iter", approx_iter, "solver iteration limit");
    approx->add_option("--mps-out", mps_out, "dump the band program in MPS format");

    CLI::App* cluster = app.add_subcommand("cluster", "k-medoid clustering with band prototypes");
    add_common(cluster, cluster_opt, true);
    cluster->add_option("--k", k, "number of clusters")->required()->check(CLI::PositiveNumber);
    cluster->add_option("--solver", cluster_solver, "exchange, lp or cross-check")
        ->check(CLI::IsMember({"exchange", "lp", "cross-check"}));
    cluster->add_option("--max-iter", cluster_iter, "solver iteration limit");
    cluster->add_option("--max-outer", max_outer, "outer iteration limit");
    cluster->add_option("--seed", seed, "seed for the farthest-first start");
    cluster->add_flag("--no-skip-rules", no_skip, "always re-solve prototypes");

    CLI::App* check = app.add_subcommand("check", "certify given prototype coefficients");
    add_common(check, check_opt, true);
    check->add_option("--coeffs", coeffs_text, "comma-separated coefficients a_0..a_n")
        ->required();

    CLI::App* envelope = app.add_subcommand("envelope", "band edges and lower bound only");
    add_common(envelope, envelope_opt, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (approx->parsed()) return run_approx(approx_opt, approx_solver, approx_iter, mps_out);
        if (cluster->parsed()) {
            return run_cluster(cluster_opt, cluster_solver, cluster_iter, k, max_outer, seed,
                               !no_skip);
        }
        if (check->parsed()) return run_check(check_opt, coeffs_text);
        if (envelope->parsed()) return run_envelope(envelope_opt);
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
