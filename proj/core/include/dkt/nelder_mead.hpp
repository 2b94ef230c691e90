#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dkt/config.hpp"
#include "dkt/rng.hpp"

namespace dkt {

using Objective = std::function<double(std::span<const double>)>;

struct SolverOptions {
    int max_iterations = 600;
    double f_tol = 1e-12;  // stop when the simplex f-spread falls below abs+rel tol
};

struct SolverResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool finite = false;  // objective finite at the returned point
};

// Downhill simplex minimization.  Infeasible points are signalled by the
// objective returning +inf; x0 must be feasible.  Never returns a point worse
// than x0.
SolverResult nelder_mead(const Objective& f, std::span<const double> x0,
                         std::span<const double> step, const SolverOptions& options = {});

// Multi-start wrapper: restart 0 is the incumbent, the rest are drawn from the
// per-coordinate priors (or jittered around the incumbent for flat priors).
// Best final value wins; exact ties break towards the lexicographically
// smallest parameter vector.  Throws SolverFailureError when every restart
// ends non-finite.
SolverResult minimize_with_restarts(const Objective& f, std::span<const double> x0,
                                    std::span<const double> step,
                                    std::span<const Prior> priors, int restarts,
                                    rng::Stream& stream, const SolverOptions& options = {});

// 1-D golden-section refinement on [lo, hi]; assumes local unimodality.
double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      int iterations = 80);

}  // namespace dkt
