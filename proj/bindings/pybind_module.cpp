#include <pybind11/pybind11.h>
PYBIND11_MODULE(aqlab, m) { m.doc() = "stub"; }
