#pragma once

#include "fraclab/bernstein.hpp"
#include "fraclab/config.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/fraccalc.hpp"
#include "fraclab/harness.hpp"
#include "fraclab/kernel.hpp"
#include "fraclab/montecarlo.hpp"
#include "fraclab/norms.hpp"
#include "fraclab/solver.hpp"
#include "fraclab/specfun.hpp"
