#pragma once

// Monte Carlo engine for the monkey walk (random walk with preferential
// relocation into its own past) under steep memory kernels, plus the
// closed-form limit theory and the statistical machinery to verify it.

#include "monkey/acceptance.hpp"
#include "monkey/config.hpp"
#include "monkey/direct.hpp"
#include "monkey/experiment.hpp"
#include "monkey/genealogy.hpp"
#include "monkey/kernel.hpp"
#include "monkey/numerics.hpp"
#include "monkey/process.hpp"
#include "monkey/rng.hpp"
#include "monkey/runlen.hpp"
#include "monkey/stats.hpp"
#include "monkey/theory.hpp"
