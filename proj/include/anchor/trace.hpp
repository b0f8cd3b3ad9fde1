#ifndef ANCHOR_TRACE_HPP
#define ANCHOR_TRACE_HPP

#include "anchor/types.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace anchor {

enum class RunStatus { Completed, EarlyStopEstimate, BudgetExhausted };

/// One per-iteration record. Fields that do not apply to a given solver are
/// left as NaN (norms) or zero (batch sizes).
struct TraceRecord {
    std::int64_t k = 0;
    std::uint64_t queries_cum = 0;
    double op_norm_true = std::numeric_limits<double>::quiet_NaN();
    double op_norm_est = std::numeric_limits<double>::quiet_NaN();
    std::int64_t batch_s1 = 0;
    std::int64_t batch_s2 = 0;
    char branch = '-';  // 'I' init, 'R' refresh, 'C' correction, '-' n/a
    double dist_to_solution = std::numeric_limits<double>::quiet_NaN();
    double uv_gap = std::numeric_limits<double>::quiet_NaN();  // ||u_k - v_{k-1}|| (two-step solvers)
    double eta = std::numeric_limits<double>::quiet_NaN();     // eta_k (two-step solvers)
    int restart = 0;  // outer round for restarted runs, 0 otherwise
};

struct RunTrace {
    std::vector<TraceRecord> records;
    // Populated only when a run is configured to keep them; aligned with records.
    std::vector<Vec> iterates;        // u_k
    std::vector<Vec> estimates;       // operator estimate used at step k
    std::vector<Vec> leading_points;  // v_{k-1} for the two-step solvers
    RunStatus status = RunStatus::Completed;
    std::uint64_t total_queries = 0;
    std::int64_t s2_cap_hits = 0;

    const TraceRecord& last() const { return records.back(); }
};

struct SolveResult {
    Vec point;
    RunTrace trace;
};

inline const char* run_status_name(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "completed";
        case RunStatus::EarlyStopEstimate: return "early_stop_estimate";
        case RunStatus::BudgetExhausted: return "budget_exhausted";
    }
    return "unknown";
}

}  // namespace anchor

#endif
