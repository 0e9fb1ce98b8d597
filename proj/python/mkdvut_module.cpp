#include <pybind11/pybind11.h>

// placeholder; the real bindings land with the pipeline module
PYBIND11_MODULE(mkdvut, m) { m.doc() = "quarter-plane mKdV engine (bindings pending)"; }
