#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chebclust/clustering.hpp"
#include "chebclust/envelope.hpp"

namespace chebclust {

struct InputSummary {
    int n_points = 0;
    double t_min = 0.0;
    double t_max = 0.0;
    int n_signals = 0;
    std::string fingerprint;
};

struct ConfigEcho {
    int degree = 0;
    std::string basis;
    std::string solver;
    int k = 1;
    double tol = kDeviationTolerance;
    long iteration_limit = 0;
    int max_outer = 0;
    std::uint64_t seed = 0;
    bool skip_rules = true;
    std::string layout;
};

struct CertificateDoc {
    std::string kind = "none";  // double-point | alternation | subdifferential
    std::optional<int> double_point;
    std::vector<int> nodes;
    std::vector<int> signs;
    std::vector<double> weights;
};

struct ClusterResultDoc {
    int cluster = 0;
    std::vector<std::string> member_ids;
    std::vector<double> coeffs;
    double delta = 0.0;
    std::string termination;
    long iterations = 0;
    long exchanges = 0;
    bool warm_start_used = false;
    bool warm_start_fallback = false;
    CertificateDoc certificate;
    bool alternation_optimal = false;
    bool subdifferential_optimal = false;
};

struct LowerBoundDoc {
    double delta_star = 0.0;
    std::vector<int> witnesses;
};

// Everything one run produced. The machine serialization is deterministic:
// identical inputs and flags give identical bytes, so no wall-clock data
// lives here; timing belongs to the human rendering only.
struct RunDocument {
    int schema_version = 1;
    std::string command;
    InputSummary input;
    ConfigEcho config;
    std::vector<ClusterResultDoc> clusters;
    std::vector<std::pair<std::string, int>> assignment;
    std::vector<ClusterEvent> events;
    std::vector<double> sum_delta_log;
    std::vector<double> max_delta_log;
    std::optional<bool> converged;
    std::optional<int> outer_iterations;
    std::optional<LowerBoundDoc> band;
};

std::uint64_t fingerprint(const SignalGroup& group);

std::string to_json(const RunDocument& doc);

// Indented summary for the terminal; elapsed wall time in seconds.
std::string to_text(const RunDocument& doc, double elapsed_seconds);

struct TraceBlock {
    int cluster = 0;
    Envelope envelope;
    Eigen::VectorXd prototype;
};

// Per-grid-point diagnostics: t, band edges, prototype and both deviations,
// one block per cluster, 17 significant digits.
void write_trace_csv(std::ostream& out, const std::vector<TraceBlock>& blocks);

const char* to_string(EventKind kind);
const char* to_string(TerminationReason reason);

}  // namespace chebclust
