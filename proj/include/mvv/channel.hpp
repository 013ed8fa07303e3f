// channel.hpp — one slot's channel power gains.
#pragma once

#include <stdexcept>

#include "mvv/matrix.hpp"

namespace mvv {

// N x K matrix of per-subcarrier per-user channel power gains, all > 0.
struct ChannelState {
    Mat<double> h;

    int subcarriers() const { return h.rows; }
    int users() const { return h.cols; }

    void check_positive() const {
        for (double g : h.data)
            if (!(g > 0)) throw std::invalid_argument("channel gains must be strictly positive");
    }
};

}  // namespace mvv
