#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsc/continuum.hpp"
#include "gsc/lattice.hpp"
#include "gsc/model.hpp"
#include "gsc/potential.hpp"

namespace gsc {

enum class CheckCmp { LE, GE };

struct Check {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    CheckCmp cmp = CheckCmp::LE;
    bool pass = false;
};

Check make_check(std::string name, double measured, double bound,
                 CheckCmp cmp = CheckCmp::LE);

struct VerifyOptions {
    std::uint64_t seed = 20250801;
    bool quick = false;  // skip the minutes-scale experiments
    Execution exec = Execution::Parallel;
};

/// The invariant suite over the shipped models. Quick mode covers the
/// seconds-scale identities; full mode adds the threshold, saturation,
/// continuum-consistency and conservation experiments.
std::vector<Check> run_verify(const VerifyOptions& opts);

bool all_pass(const std::vector<Check>& checks);

// ---- experiment drivers shared with the acceptance suite ----

struct SaturationResult {
    bool converged = false;
    double final_max_perf = 0.0;  // max perf over sites at the end
    double center_gap_to_bad = 0.0;
    long iters = 0;
};

/// Coupled run of the (bec_l, bec_r, eps) system from the all-bad state with
/// the boundary pinned to zero.
SaturationResult saturation_experiment(double eps, int k, int l_size, int w,
                                       long max_iters, double stop_eps,
                                       Execution exec, int bec_l = 3, int bec_r = 6);

struct PdeSaturationResult {
    PdeRunResult run;
    double interior_deviation = 0.0;   // from the good boundary value
    double residual_converged = 0.0;   // sup-norm BVP residual at the end
    double residual_initial = 0.0;     // same for the all-bad start
};

/// Gradient-flow PDE of the (3,6,eps) system, v_tilde chart, all-bad start.
PdeSaturationResult pde_saturation_experiment(double eps, int k, int n,
                                              double m_coeff, Execution exec,
                                              long max_steps = 2000000,
                                              double stop_eps = 1e-12);

/// Stationary u_tilde-chart profile via the dual-chart flow, then the K=1
/// conservation drift on it.
double conservation_drift(double eps, int n, double m_coeff, Execution exec);

/// Sup-norm gap between the converged K=1 lattice profile (window w=1) and
/// the stationary PDE profile with the matching m coefficient, mapped back to
/// u through the inverse transform. Grid n = 8 l_size + 1.
double lattice_continuum_gap(double eps, int l_size, Execution exec);

/// Final sup-norm deviation of the converged v_tilde field from the good
/// value, for the M -> 0 uniformity family.
double uniformity_deviation(double eps, double m_coeff, int n, Execution exec);

/// One coupled step on a smooth macroscopic K=1 profile, against the
/// second-order continuum prediction with the matching m coefficient.
/// The sup-norm error carries only the neglected higher window moments and
/// falls off quickly with l_size.
double step_consistency_error(double eps, int l_size, Execution exec);

}  // namespace gsc
