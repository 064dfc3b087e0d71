#pragma once

// Extended precision used where diagonal flows amplify rounding: after
// time t the flowed basis carries a relative error of order e^{2t} times
// the working epsilon.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <vector>

namespace expwalk {

using hp_real = boost::multiprecision::cpp_bin_float_50;

/// Dense row-major matrix over hp_real; only what the flow code needs.
struct HpMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<hp_real> data;

    HpMatrix() = default;
    HpMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}

    hp_real& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    const hp_real& operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

}  // namespace expwalk
