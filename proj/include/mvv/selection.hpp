// selection.hpp — view selection variables and their feasibility checks.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvv/lattice.hpp"
#include "mvv/matrix.hpp"
#include "mvv/system.hpp"

namespace mvv {

// x_v = max_k y_{k,v}: a view is transmitted iff some user utilizes it.
std::vector<uint8_t> induced_transmission(const Mat<uint8_t>& y);

// Binary utilization matrix y (K x |lattice|) with the induced transmission
// vector x. x is always derived from y, so x >= y and the recovery identity
// hold by construction.
struct ViewSelection {
    Mat<uint8_t> y;
    std::vector<uint8_t> x;

    ViewSelection() = default;
    explicit ViewSelection(Mat<uint8_t> util) : y(std::move(util)), x(induced_transmission(y)) {}

    int num_active_views() const;
};

struct ConstraintViolation {
    std::string constraint;  // "(3)", "(4)", "(5)" or "binary"
    int user = -1;
    int view = -1;  // lattice position, -1 when the violation is row-level
};

struct ValidityReport {
    bool ok = true;
    std::vector<ConstraintViolation> violations;
};

// Checks the per-user anchor equations against each user's request and
// synthesis radius. Reports every violation, not just the first.
ValidityReport validate_selection(const ViewSelection& sel, const SystemParams& params,
                                  const ViewLattice& lattice);

struct SynthesisEnergy {
    double server = 0;    // E_b * (# synthetic views transmitted)
    double users = 0;     // sum of E_u,k over users not receiving their request
    double weighted = 0;  // server + beta * users
};

SynthesisEnergy synthesis_energy(const ViewSelection& sel, const SystemParams& params,
                                 const ViewLattice& lattice);

}  // namespace mvv
