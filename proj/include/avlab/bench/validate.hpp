#pragma once

#include <vector>

#include "avlab/bench/experiment.hpp"

namespace avlab {

/// Every closed-form coefficient, asymptotic and book-geometry check, each
/// at its documented tolerance.
std::vector<CheckResult> run_validations(unsigned threads = 1);

}  // namespace avlab
