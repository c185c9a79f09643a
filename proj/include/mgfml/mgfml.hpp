#pragma once

#include "mgfml/errors.hpp"
#include "mgfml/fit.hpp"
#include "mgfml/marginalize.hpp"
#include "mgfml/mgf.hpp"
#include "mgfml/models.hpp"
#include "mgfml/optimize.hpp"
#include "mgfml/oracles.hpp"
#include "mgfml/quadrature.hpp"
#include "mgfml/random.hpp"
#include "mgfml/signed_log.hpp"
#include "mgfml/special_fn.hpp"
#include "mgfml/taylor_series.hpp"
