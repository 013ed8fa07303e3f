// matrix.hpp — minimal dense row-major matrix used across the library.
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mvv {

template <typename T>
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<T> data;

    Mat() = default;
    Mat(int r, int c, T fill = T{}) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {
        if (r < 0 || c < 0) throw std::invalid_argument("Mat: negative dimension");
    }

    T& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    const T& operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && data == o.data; }
};

inline Mat<double> to_double(const Mat<uint8_t>& m) {
    Mat<double> out(m.rows, m.cols, 0.0);
    for (size_t i = 0; i < m.data.size(); ++i) out.data[i] = m.data[i];
    return out;
}

}  // namespace mvv
