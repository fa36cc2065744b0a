// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "polyinv/rational.hpp"
#include "polyinv/resource.hpp"
#include "polyinv/monomial.hpp"
#include "polyinv/polynomial.hpp"
#include "polyinv/poly_io.hpp"
#include "polyinv/poly_map.hpp"
#include "polyinv/groebner.hpp"
#include "polyinv/linear_algebra.hpp"
#include "polyinv/invariant_set.hpp"
#include "polyinv/loop.hpp"
#include "polyinv/truncated_ideal.hpp"
#include "polyinv/parametric.hpp"
#include "polyinv/lifting.hpp"
