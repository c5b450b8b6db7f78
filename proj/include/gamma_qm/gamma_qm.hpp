#pragma once

#include "gamma_qm/analytic.hpp"
#include "gamma_qm/deformation.hpp"
#include "gamma_qm/errors.hpp"
#include "gamma_qm/frame.hpp"
#include "gamma_qm/io.hpp"
#include "gamma_qm/linalg.hpp"
#include "gamma_qm/numeric.hpp"
#include "gamma_qm/operators.hpp"
#include "gamma_qm/tridiagonal.hpp"
#include "gamma_qm/verification.hpp"
