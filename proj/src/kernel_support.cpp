#include "krecon/kernel_support.hpp"

#include <algorithm>
#include <stdexcept>

namespace krecon {

int KernelSupport::min_p() const {
    int m = 0;
    for (const auto& o : offsets) m = std::min(m, o.first);
    return m;
}
int KernelSupport::max_p() const {
    int m = 0;
    for (const auto& o : offsets) m = std::max(m, o.first);
    return m;
}
int KernelSupport::min_q() const {
    int m = 0;
    for (const auto& o : offsets) m = std::min(m, o.second);
    return m;
}
int KernelSupport::max_q() const {
    int m = 0;
    for (const auto& o : offsets) m = std::max(m, o.second);
    return m;
}

bool KernelSupport::contains(int p, int q) const {
    return std::find(offsets.begin(), offsets.end(), std::make_pair(p, q)) != offsets.end();
}

KernelSupport kernel_support(int r1, int r2, SupportShape shape) {
    if (r1 < 1 || r2 < 1 || r1 % 2 == 0 || r2 % 2 == 0)
        throw std::invalid_argument("kernel_support: extents must be odd and positive");
    KernelSupport s;
    s.r1 = r1;
    s.r2 = r2;
    s.shape = shape;
    const int a = (r1 - 1) / 2;
    const int b = (r2 - 1) / 2;
    for (int p = -a; p <= a; ++p) {
        for (int q = -b; q <= b; ++q) {
            if (shape == SupportShape::Ellipsoidal) {
                // Degenerate axis (extent 1) pins that coordinate to 0.
                const double tp = (a == 0) ? (p == 0 ? 0.0 : 2.0) : static_cast<double>(p) / a;
                const double tq = (b == 0) ? (q == 0 ? 0.0 : 2.0) : static_cast<double>(q) / b;
                if (tp * tp + tq * tq > 1.0) continue;
            }
            s.offsets.emplace_back(p, q);
        }
    }
    return s;
}

KernelSupport rect_support(int r1, int r2) {
    if (r1 < 1 || r2 < 1) throw std::invalid_argument("rect_support: extents must be positive");
    KernelSupport s;
    s.r1 = r1;
    s.r2 = r2;
    s.shape = SupportShape::Rectangular;
    const int p0 = -(r1 / 2);
    const int q0 = -(r2 / 2);
    for (int p = p0; p < p0 + r1; ++p)
        for (int q = q0; q < q0 + r2; ++q) s.offsets.emplace_back(p, q);
    return s;
}

} // namespace krecon
