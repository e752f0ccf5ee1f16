#include "coreset/random.hpp"

#include <algorithm>
#include <stdexcept>

namespace coreset {

DiscreteSampler::DiscreteSampler(std::span<const double> mass) {
    cumulative_.reserve(mass.size());
    double running = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (!(mass[i] >= 0.0)) {
            throw std::invalid_argument("sampling mass must be non-negative");
        }
        running += mass[i];
        if (mass[i] > 0.0) {
            last_positive_ = i;
        }
        cumulative_.push_back(running);
    }
    if (!(running > 0.0)) {
        throw std::invalid_argument("sampling mass has no positive entry");
    }
}

std::size_t DiscreteSampler::operator()(Rng& rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) {
        return last_positive_;
    }
    return static_cast<std::size_t>(it - cumulative_.begin());
}

}  // namespace coreset
