#pragma once

#include <stdexcept>
#include <string>

namespace clusterlab {

struct resolution_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct factorization_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct band_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invariant_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct step_size_error : std::runtime_error {
    step_size_error(const std::string& what, double suggested)
        : std::runtime_error(what), suggested_dt(suggested) {}
    double suggested_dt;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace clusterlab
