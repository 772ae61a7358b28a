#pragma once

#include "summa/spaces.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace summa {

/// A finite family of vectors in one space, indexed either by 1..m or by a
/// multi-index box m₁×…×mₖ (row-major, last index fastest).
///
/// Functional families are stored the same way, over the dual space: a
/// family of functionals on F is a VectorFamily in F*. Its weak norm is then
/// computed against the unit ball of F, as it should be.
class VectorFamily {
public:
    VectorFamily(SpaceSpec space, std::vector<std::size_t> shape, std::vector<double> data);

    /// One-dimensional family from explicit members.
    static VectorFamily from_members(SpaceSpec space, const std::vector<std::vector<double>>& members);
    static VectorFamily zeros(SpaceSpec space, std::vector<std::size_t> shape);

    const SpaceSpec& space() const noexcept { return space_; }
    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size() / space_.dim; }
    std::size_t dim() const noexcept { return space_.dim; }

    std::span<const double> member(std::size_t i) const { return {data_.data() + i * space_.dim, space_.dim}; }
    std::span<double> member(std::size_t i) { return {data_.data() + i * space_.dim, space_.dim}; }
    Vector vector(std::size_t i) const;

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    VectorFamily scaled(double factor) const;

    /// Same members, flattened to a one-dimensional index.
    VectorFamily flattened() const;

    /// Reinterprets the members as living in another space of equal dimension.
    VectorFamily with_space(SpaceSpec s) const;

private:
    SpaceSpec space_;
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// Product of the extents of a multi-index box.
std::size_t box_volume(std::span<const std::size_t> shape);

} // namespace summa
