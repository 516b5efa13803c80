#pragma once

// Umbrella header: the full maximum-quartet-consistency toolkit.

#include "mqc/encoder.hpp"
#include "mqc/errors.hpp"
#include "mqc/generate.hpp"
#include "mqc/newick.hpp"
#include "mqc/opb.hpp"
#include "mqc/oracle.hpp"
#include "mqc/pb.hpp"
#include "mqc/pipeline.hpp"
#include "mqc/qrt.hpp"
#include "mqc/quartets.hpp"
#include "mqc/siblings.hpp"
#include "mqc/solver.hpp"
#include "mqc/trees.hpp"
#include "mqc/ultrametric.hpp"

namespace mqc {
inline constexpr const char* kVersion = "1.0.0";
}
