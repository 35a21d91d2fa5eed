#include "subquad/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace subquad {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace,
                     bool with_newton_solves) {
    bool any_gap = false;
    for (const TraceRow& r : trace)
        if (!std::isnan(r.gap)) any_gap = true;

    os << "iter,matvecs,f";
    if (any_gap) os << ",gap";
    os << ",grad_norm,x_norm";
    if (with_newton_solves) os << ",newton_solves";
    os << "\n";
    for (const TraceRow& r : trace) {
        os << r.iter << ',' << r.matvecs << ',' << format_double(r.f);
        if (any_gap) os << ',' << format_double(r.gap);
        os << ',' << format_double(r.grad_norm) << ',' << format_double(r.x_norm);
        if (with_newton_solves) os << ',' << r.newton_solves;
        os << "\n";
    }
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace,
                     bool with_newton_solves) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open trace file: " + path);
    write_trace_csv(os, trace, with_newton_solves);
}

}  // namespace subquad
