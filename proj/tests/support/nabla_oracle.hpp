#pragma once

#include "gck/tensor.hpp"

namespace gck::testing {

// Numeric assembly of one covariant-differential component, written
// independently of the production engine: the connection matrices are
// evaluated to numbers first, group handling is table-driven, and the
// pieces are summed numerically. out_idx is the tensor's multi-index
// with the new tangent direction appended last.
Complex nabla_component_oracle(const TensorField& x, const ConnectionTriple& conn,
                               const FrameField& frame, std::span<const int> out_idx,
                               const ChartPoint& p);

}  // namespace gck::testing
