#pragma once

#include "hjgraph/scheme.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hjgraph {

/// Samples a field on a nested coarser lattice. Throws std::invalid_argument
/// when the coarse N does not divide the fine N or the dimensions differ.
Field restrict_to(const Field& fine, const std::shared_ptr<const Lattice>& coarse);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares on (log h, log e). Throws std::invalid_argument with fewer
/// than 3 points, mismatched lengths, or nonpositive entries.
RateFit fit_rate(std::span<const double> h, std::span<const double> e);

struct LevelReport {
    int N = 0;
    double h = 0.0;
    bool reference = false;
    bool diverged = false;
    std::string message;
    std::size_t steps = 0;
    // Errors at T against the restricted reference, normalised by sum w h^{d-1}.
    double l1w_error = 0.0;
    double linf_error = 0.0;
    // Largest error over the shared sample times and T (logged, not gated).
    double sup_l1w_error = 0.0;
    double sup_linf_error = 0.0;
    /// |u_N - u_{N'}| at T against the next finer level N' (logged, not gated); 0 when absent.
    double cauchy_l1w = 0.0;
    double max_m1 = 0.0;
    double max_m2 = 0.0;
    double remainder_l1 = 0.0;  // max over t
    /// max over t of |u(t)|_inf - (|U0|_inf + t |F|_inf); <= 0 when the a-priori bound holds.
    double linf_excess = 0.0;
};

struct ConvergenceReport {
    double r0 = 0.0;
    double gamma = 0.0;
    int reference_N = 0;
    std::vector<LevelReport> levels;  // increasing N; the last one is the reference
    std::optional<RateFit> l1w;
    std::optional<RateFit> linf;
    std::optional<RateFit> remainder;
    std::optional<RateFit> sup_l1w;
    std::optional<RateFit> sup_linf;
    std::optional<RateFit> cauchy_l1w;
};

struct StudyOptions {
    /// Calibrate R0 once at the coarsest level and use it for every level.
    bool auto_r0 = false;
    /// Kept fixed during calibration; defaults to 2 R0.
    std::optional<double> gamma;
    /// Interior sample times, as fractions of T, for the sup-over-t errors.
    std::vector<double> sample_fractions{0.25, 0.5, 0.75};
};

/// Solves at every N in n_list against the finest-grid reference. Throws
/// std::invalid_argument when the list has duplicates, fewer than 2 entries,
/// or is not nested; std::runtime_error when the reference diverges.
/// Diverged coarse levels are marked and excluded from the fits.
ConvergenceReport refinement_study(const SolverConfig& base, std::vector<int> n_list,
                                   const StudyOptions& options = {});

/// N,h,l1w_error,linf_error,max_m1,max_m2,remainder_l1 (error fields are
/// empty on the reference row and on diverged rows).
void write_rates_csv(std::ostream& os, const ConvergenceReport& report);
void write_rates_json(std::ostream& os, const ConvergenceReport& report);

}  // namespace hjgraph
