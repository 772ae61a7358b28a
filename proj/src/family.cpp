#include "summa/family.hpp"

#include <stdexcept>
#include <string>

namespace summa {

std::size_t box_volume(std::span<const std::size_t> shape) {
    std::size_t v = 1;
    for (auto e : shape) {
        v *= e;
    }
    return v;
}

VectorFamily::VectorFamily(SpaceSpec space, std::vector<std::size_t> shape, std::vector<double> data)
    : space_(space), shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_.empty()) {
        throw std::invalid_argument("family shape must have at least one extent");
    }
    for (auto e : shape_) {
        if (e == 0) {
            throw std::invalid_argument("family extents must be positive");
        }
    }
    const std::size_t expected = box_volume(shape_) * space_.dim;
    if (data_.size() != expected) {
        throw std::invalid_argument("family data has " + std::to_string(data_.size()) + " entries, shape needs " +
                                    std::to_string(expected));
    }
}

VectorFamily VectorFamily::from_members(SpaceSpec space, const std::vector<std::vector<double>>& members) {
    std::vector<double> data;
    data.reserve(members.size() * space.dim);
    for (const auto& m : members) {
        if (m.size() != space.dim) {
            throw std::invalid_argument("family member has the wrong dimension");
        }
        data.insert(data.end(), m.begin(), m.end());
    }
    return VectorFamily(space, {members.size()}, std::move(data));
}

VectorFamily VectorFamily::zeros(SpaceSpec space, std::vector<std::size_t> shape) {
    const std::size_t n = box_volume(shape) * space.dim;
    return VectorFamily(space, std::move(shape), std::vector<double>(n, 0.0));
}

Vector VectorFamily::vector(std::size_t i) const {
    auto m = member(i);
    return Vector(space_, std::vector<double>(m.begin(), m.end()));
}

VectorFamily VectorFamily::scaled(double factor) const {
    VectorFamily out = *this;
    for (double& v : out.data_) {
        v *= factor;
    }
    return out;
}

VectorFamily VectorFamily::flattened() const { return VectorFamily(space_, {size()}, data_); }

VectorFamily VectorFamily::with_space(SpaceSpec s) const {
    if (s.dim != space_.dim) {
        throw std::invalid_argument("with_space: dimension mismatch");
    }
    return VectorFamily(s, shape_, data_);
}

} // namespace summa
