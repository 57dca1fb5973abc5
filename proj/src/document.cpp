#include "chebclust/document.hpp"

#include <cstdio>
#include <cstring>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace chebclust {

namespace {

void feed(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
}

void feed_double(std::uint64_t& h, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    feed(h, &bits, sizeof bits);
}

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::uint64_t fingerprint(const SignalGroup& group) {
    std::uint64_t h = 1469598103934665603ULL;
    feed(h, "grid", 4);
    for (int i = 0; i < group.grid.size(); ++i) feed_double(h, group.grid.points[i]);
    feed(h, "ids", 3);
    for (const auto& id : group.ids) {
        feed(h, id.data(), id.size());
        feed(h, "\x1f", 1);
    }
    feed(h, "rows", 4);
    for (int r = 0; r < group.count(); ++r) {
        for (int c = 0; c < group.grid.size(); ++c) feed_double(h, group.samples(r, c));
    }
    return h;
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Solve: return "solve";
        case EventKind::SkipMembershipUnchanged: return "skip-membership-unchanged";
        case EventKind::SkipEnvelopeUnchanged: return "skip-envelope-unchanged";
        case EventKind::SkipCertificateHolds: return "skip-certificate-holds";
        case EventKind::SkipGapBound: return "skip-gap-bound";
        case EventKind::Move: return "move";
        case EventKind::EmptyClusterRepair: return "empty-cluster-repair";
        case EventKind::WarmStartFallback: return "warm-start-fallback";
        case EventKind::CycleDetected: return "cycle-detected";
    }
    return "unknown";
}

const char* to_string(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::OptimalDoublePoint: return "optimal-double-point";
        case TerminationReason::OptimalAlternation: return "optimal-alternation";
        case TerminationReason::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

std::string to_json(const RunDocument& doc) {
    using json = nlohmann::ordered_json;
    json j;
    j["schema_version"] = doc.schema_version;
    j["command"] = doc.command;

    json input;
    input["n_points"] = doc.input.n_points;
    input["t_min"] = doc.input.t_min;
    input["t_max"] = doc.input.t_max;
    input["n_signals"] = doc.input.n_signals;
    input["fingerprint"] = doc.input.fingerprint;
    j["input"] = input;

    json config;
    config["degree"] = doc.config.degree;
    config["basis"] = doc.config.basis;
    config["solver"] = doc.config.solver;
    config["k"] = doc.config.k;
    config["tol"] = doc.config.tol;
    config["iteration_limit"] = doc.config.iteration_limit;
    config["max_outer"] = doc.config.max_outer;
    config["seed"] = doc.config.seed;
    config["skip_rules"] = doc.config.skip_rules;
    config["layout"] = doc.config.layout;
    j["config"] = config;

    if (doc.band) {
        json band;
        band["delta_star"] = doc.band->delta_star;
        band["witnesses"] = doc.band->witnesses;
        j["band"] = band;
    }

    json clusters = json::array();
    for (const auto& c : doc.clusters) {
        json jc;
        jc["cluster"] = c.cluster;
        jc["members"] = c.member_ids;
        jc["coefficients"] = c.coeffs;
        jc["delta"] = c.delta;
        jc["termination"] = c.termination;
        jc["iterations"] = c.iterations;
        jc["exchanges"] = c.exchanges;
        jc["warm_start_used"] = c.warm_start_used;
        jc["warm_start_fallback"] = c.warm_start_fallback;
        json cert;
        cert["kind"] = c.certificate.kind;
        if (c.certificate.double_point) cert["double_point"] = *c.certificate.double_point;
        if (!c.certificate.nodes.empty()) {
            cert["nodes"] = c.certificate.nodes;
            cert["signs"] = c.certificate.signs;
        }
        if (!c.certificate.weights.empty()) cert["weights"] = c.certificate.weights;
        jc["certificate"] = cert;
        jc["alternation_optimal"] = c.alternation_optimal;
        jc["subdifferential_optimal"] = c.subdifferential_optimal;
        clusters.push_back(jc);
    }
    j["clusters"] = clusters;

    if (!doc.assignment.empty()) {
        json assignment;
        for (const auto& [id, cluster] : doc.assignment) assignment[id] = cluster;
        j["assignment"] = assignment;
    }
    if (doc.converged) j["converged"] = *doc.converged;
    if (doc.outer_iterations) j["outer_iterations"] = *doc.outer_iterations;
    if (!doc.sum_delta_log.empty()) {
        j["sum_delta_log"] = doc.sum_delta_log;
        j["max_delta_log"] = doc.max_delta_log;
    }

    json events = json::array();
    for (const auto& ev : doc.events) {
        json je;
        je["outer_iteration"] = ev.outer_iteration;
        je["kind"] = to_string(ev.kind);
        if (ev.cluster >= 0) je["cluster"] = ev.cluster;
        if (!ev.signal_id.empty()) je["signal"] = ev.signal_id;
        if (ev.from_cluster >= 0) je["from"] = ev.from_cluster;
        if (ev.to_cluster >= 0) je["to"] = ev.to_cluster;
        if (ev.kind == EventKind::Solve) {
            je["solver_iterations"] = ev.solver_iterations;
            je["delta"] = ev.delta;
        } else if (ev.kind == EventKind::SkipMembershipUnchanged ||
                   ev.kind == EventKind::SkipEnvelopeUnchanged ||
                   ev.kind == EventKind::SkipCertificateHolds ||
                   ev.kind == EventKind::SkipGapBound) {
            je["delta"] = ev.delta;
        }
        events.push_back(je);
    }
    j["events"] = events;

    return j.dump(2) + "\n";
}

std::string to_text(const RunDocument& doc, double elapsed_seconds) {
    std::ostringstream out;
    out << doc.command << " run\n";
    out << "  input: " << doc.input.n_signals << " signal(s) on " << doc.input.n_points
        << " points in [" << format17(doc.input.t_min) << ", " << format17(doc.input.t_max)
        << "]\n";
    out << "  config: degree " << doc.config.degree << ", basis " << doc.config.basis
        << ", solver " << doc.config.solver << ", k " << doc.config.k << ", tol "
        << doc.config.tol << "\n";
    if (doc.band) {
        out << "  band: delta_star " << format17(doc.band->delta_star) << ", "
            << doc.band->witnesses.size() << " witness point(s)\n";
    }
    for (const auto& c : doc.clusters) {
        out << "  cluster " << c.cluster << ": delta " << format17(c.delta);
        if (!c.termination.empty()) out << ", " << c.termination;
        out << ", " << c.iterations << " iteration(s), " << c.exchanges << " exchange(s)\n";
        out << "    members:";
        for (const auto& id : c.member_ids) out << " " << id;
        out << "\n    coefficients:";
        for (double a : c.coeffs) out << " " << format17(a);
        out << "\n    certificate: " << c.certificate.kind;
        if (c.certificate.double_point) out << " at index " << *c.certificate.double_point;
        out << "; alternation " << (c.alternation_optimal ? "accepted" : "rejected")
            << ", subdifferential " << (c.subdifferential_optimal ? "accepted" : "rejected")
            << "\n";
    }
    if (doc.converged) {
        out << "  outer iterations: " << (doc.outer_iterations ? *doc.outer_iterations : 0)
            << (*doc.converged ? " (converged)" : " (not converged)") << "\n";
    }
    int solves = 0, skips = 0, moves = 0;
    for (const auto& ev : doc.events) {
        switch (ev.kind) {
            case EventKind::Solve: ++solves; break;
            case EventKind::SkipMembershipUnchanged:
            case EventKind::SkipEnvelopeUnchanged:
            case EventKind::SkipCertificateHolds:
            case EventKind::SkipGapBound: ++skips; break;
            case EventKind::Move: ++moves; break;
            default: break;
        }
    }
    if (!doc.events.empty()) {
        out << "  events: " << solves << " solve(s), " << skips << " skip(s), " << moves
            << " move(s)\n";
    }
    out << "  elapsed: " << elapsed_seconds << " s\n";
    return out.str();
}

void write_trace_csv(std::ostream& out, const std::vector<TraceBlock>& blocks) {
    out << "cluster,t,s_max,s_min,prototype,upper_deviation,lower_deviation\n";
    for (const auto& block : blocks) {
        const Envelope& env = block.envelope;
        for (int i = 0; i < env.grid.size(); ++i) {
            const double p = block.prototype[i];
            out << block.cluster << ',' << format17(env.grid.points[i]) << ','
                << format17(env.upper[i]) << ',' << format17(env.lower[i]) << ','
                << format17(p) << ',' << format17(env.upper[i] - p) << ','
                << format17(p - env.lower[i]) << "\n";
        }
    }
}

}  // namespace chebclust
