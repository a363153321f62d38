#include "conjlab/parallel.hpp"

#include <omp.h>

#include "conjlab/errors.hpp"

namespace conjlab {

Exec exec_from_string(const std::string& s) {
    if (s == "serial") return Exec::serial;
    if (s == "openmp") return Exec::openmp;
    throw InputError("unknown execution mode '" + s + "' (expected serial or openmp)");
}

std::string to_string(Exec e) { return e == Exec::serial ? "serial" : "openmp"; }

int available_threads() { return omp_get_max_threads(); }

}  // namespace conjlab
