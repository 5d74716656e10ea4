#pragma once

#include <utility>
#include <vector>

namespace krecon {

enum class SupportShape { Rectangular, Ellipsoidal };

// Convolution footprint: an ordered set of integer (p,q) offsets.
// Ellipsoidal supports keep only offsets inside the ellipse inscribed in
// the r1 x r2 bounding rectangle.
struct KernelSupport {
    int r1 = 1;
    int r2 = 1;
    SupportShape shape = SupportShape::Rectangular;
    std::vector<std::pair<int, int>> offsets; // row-major order

    int count() const { return static_cast<int>(offsets.size()); }
    // Extreme extents, used for valid-placement and padding bookkeeping.
    int min_p() const;
    int max_p() const;
    int min_q() const;
    int max_q() const;
    bool contains(int p, int q) const;
};

// Centered support with odd extents. Throws on even r1/r2.
KernelSupport kernel_support(int r1, int r2, SupportShape shape);

// Rectangular support allowing even extents; an even extent r spans
// offsets [-r/2, r/2 - 1] (the extra tap goes to the negative side).
KernelSupport rect_support(int r1, int r2);

} // namespace krecon
