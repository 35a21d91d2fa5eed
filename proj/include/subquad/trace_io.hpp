#pragma once

#include "subquad/types.hpp"

#include <ostream>
#include <string>

namespace subquad {

/// Writes `iter,matvecs,f,gap,grad_norm,x_norm` rows (gap column omitted
/// when no row carries one; newton_solves appended when requested).
/// Floats are printed with %.17g so the file round-trips exactly.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace,
                     bool with_newton_solves = false);
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace,
                     bool with_newton_solves = false);

std::string format_double(double v);

}  // namespace subquad
