#pragma once

// Support-free wavelet thresholding density estimation on the real line.

#include "basis.hpp"
#include "besov.hpp"
#include "estimator.hpp"
#include "functions.hpp"
#include "kernel.hpp"
#include "oracle.hpp"
#include "risk.hpp"
#include "sample.hpp"
#include "signals.hpp"
#include "spline_basis.hpp"
#include "threshold.hpp"
