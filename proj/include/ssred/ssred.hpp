#ifndef SSRED_SSRED_HPP
#define SSRED_SSRED_HPP

#include "ssred/canonical.hpp"
#include "ssred/cover.hpp"
#include "ssred/cover_canonical.hpp"
#include "ssred/diagnostics.hpp"
#include "ssred/dual_graph.hpp"
#include "ssred/graph_ops.hpp"
#include "ssred/ids.hpp"
#include "ssred/io.hpp"
#include "ssred/model.hpp"
#include "ssred/oracle.hpp"
#include "ssred/quotient.hpp"
#include "ssred/rational.hpp"

#endif // SSRED_SSRED_HPP
