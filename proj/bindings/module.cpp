#include <pybind11/pybind11.h>

#include "tqnn/version.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
    m.attr("__version__") = tqnn::kVersion;
}
