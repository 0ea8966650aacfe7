#pragma once

#include "ddsv/errors.hpp"
#include "ddsv/market.hpp"
#include "ddsv/model.hpp"
#include "ddsv/charfn.hpp"
#include "ddsv/gradient.hpp"
#include "ddsv/quadrature.hpp"
#include "ddsv/pricer.hpp"
#include "ddsv/calib.hpp"
#include "ddsv/optim/result.hpp"
#include "ddsv/optim/bounds.hpp"
#include "ddsv/optim/lm.hpp"
#include "ddsv/optim/nelder_mead.hpp"
#include "ddsv/optim/bfgs.hpp"
#include "ddsv/optim/feller.hpp"
#include "ddsv/bench.hpp"
#include "ddsv/fixtures.hpp"
