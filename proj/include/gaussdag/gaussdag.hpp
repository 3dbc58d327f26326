#pragma once

#include "gaussdag/causal.hpp"
#include "gaussdag/chain.hpp"
#include "gaussdag/dagprior.hpp"
#include "gaussdag/dagwishart.hpp"
#include "gaussdag/dataset.hpp"
#include "gaussdag/errors.hpp"
#include "gaussdag/graph.hpp"
#include "gaussdag/io.hpp"
#include "gaussdag/mcmc.hpp"
#include "gaussdag/numkernel.hpp"
#include "gaussdag/oracle.hpp"
#include "gaussdag/simulate.hpp"
#include "gaussdag/summaries.hpp"

namespace gaussdag {
inline constexpr const char* kVersion = "0.1.0";
}
