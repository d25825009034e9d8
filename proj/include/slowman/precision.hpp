#pragma once

// 113-bit binary float with Eigen support, for checks whose signal sits below
// double round-off.
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace slowman {
using Quad = boost::multiprecision::cpp_bin_float_quad;
}
