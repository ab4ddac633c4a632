#pragma once

#include "mpsqvm/backend.hpp"
#include "mpsqvm/bench.hpp"
#include "mpsqvm/dense.hpp"
#include "mpsqvm/errors.hpp"
#include "mpsqvm/gates.hpp"
#include "mpsqvm/ir.hpp"
#include "mpsqvm/mps.hpp"
#include "mpsqvm/parser.hpp"
#include "mpsqvm/pauli.hpp"
#include "mpsqvm/range.hpp"
#include "mpsqvm/sampling.hpp"
#include "mpsqvm/vqe.hpp"
