#pragma once

#include "gsc/continuum.hpp"
#include "gsc/lattice.hpp"

// Plain serial reference implementations of the data-parallel kernels. Kept
// for differential testing and for the benchmark baseline; no workspace
// reuse, direct lexicographic loops.
namespace gsc::ref {

Vec window_average(const LatticeField& field, std::span<const int> position,
                   WindowDirection direction);

GscStepInfo gsc_step(const SystemModel& model, LatticeField& field);

PdeStepInfo pde_step(const SystemModel& model, ContinuumField& field, double dt);

double energy_functional(const SystemModel& model, const ContinuumField& field);

}  // namespace gsc::ref
