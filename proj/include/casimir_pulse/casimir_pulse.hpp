#pragma once

#include "casimir_pulse/bogoliubov.hpp"
#include "casimir_pulse/eigensolve.hpp"
#include "casimir_pulse/errors.hpp"
#include "casimir_pulse/greens.hpp"
#include "casimir_pulse/model.hpp"
#include "casimir_pulse/overlap.hpp"
#include "casimir_pulse/quantum_inequality.hpp"
#include "casimir_pulse/stress.hpp"
#include "casimir_pulse/summation.hpp"
#include "casimir_pulse/zeta_series.hpp"
