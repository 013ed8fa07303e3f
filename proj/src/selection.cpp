// selection.cpp
#include "mvv/selection.hpp"

#include <stdexcept>

namespace mvv {

std::vector<uint8_t> induced_transmission(const Mat<uint8_t>& y) {
    std::vector<uint8_t> x(y.cols, 0);
    for (int k = 0; k < y.rows; ++k)
        for (int v = 0; v < y.cols; ++v)
            if (y(k, v)) x[v] = 1;
    return x;
}

int ViewSelection::num_active_views() const {
    int n = 0;
    for (uint8_t b : x) n += b;
    return n;
}

ValidityReport validate_selection(const ViewSelection& sel, const SystemParams& params,
                                  const ViewLattice& lattice) {
    const int K = params.K();
    const int S = lattice.size();
    if (sel.y.rows != K || sel.y.cols != S)
        throw std::invalid_argument("validate_selection: y dimensions do not match K x |views|");

    ValidityReport report;
    auto flag = [&](const char* c, int k, int v) {
        report.ok = false;
        report.violations.push_back({c, k, v});
    };

    for (int k = 0; k < K; ++k) {
        const auto& user = params.users[k];
        const auto nb = synthesis_neighborhoods(user.request, user.delta, lattice);

        std::vector<uint8_t> admissible(S, 0);
        admissible[user.request] = 1;
        for (int v : nb.left) admissible[v] = 1;
        for (int v : nb.right) admissible[v] = 1;

        int left_sum = 0, right_sum = 0;
        for (int v = 0; v < S; ++v) {
            const uint8_t b = sel.y(k, v);
            if (b > 1) flag("binary", k, v);
            if (b && !admissible[v]) flag("(5)", k, v);
        }
        for (int v : nb.left) left_sum += sel.y(k, v) ? 1 : 0;
        for (int v : nb.right) right_sum += sel.y(k, v) ? 1 : 0;
        const int direct = sel.y(k, user.request) ? 1 : 0;
        if (direct + left_sum != 1) flag("(3)", k, user.request);
        if (direct + right_sum != 1) flag("(4)", k, user.request);
    }
    return report;
}

SynthesisEnergy synthesis_energy(const ViewSelection& sel, const SystemParams& params,
                                 const ViewLattice& lattice) {
    SynthesisEnergy e;
    for (int v = 0; v < lattice.size(); ++v)
        if (sel.x[v] && !lattice.is_original(v)) e.server += params.E_b;
    for (int k = 0; k < params.K(); ++k)
        if (!sel.y(k, params.users[k].request)) e.users += params.users[k].synth_energy;
    e.weighted = e.server + params.beta * e.users;
    return e;
}

}  // namespace mvv
