#pragma once

#include "poexp/counting.hpp"
#include "poexp/errors.hpp"
#include "poexp/jump_law.hpp"
#include "poexp/kernel.hpp"
#include "poexp/linear_case.hpp"
#include "poexp/market.hpp"
#include "poexp/mean_equations.hpp"
#include "poexp/poexp_distribution.hpp"
#include "poexp/random.hpp"
#include "poexp/sequence.hpp"
#include "poexp/series.hpp"
#include "poexp/signed_log.hpp"
#include "poexp/special.hpp"
#include "poexp/telegraph.hpp"
