#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <type_traits>

namespace evolearn {

// sin/cos pair for the pole angles. Inside |x| <= pi/4 (every live episode
// state; the failure angle is pi/5) it evaluates the fdlibm minimax kernels,
// which are accurate to within one ulp; outside that range, and for
// non-double scalars, it defers to the standard library.
template <typename Scalar>
inline void pole_sincos(Scalar x, Scalar& s, Scalar& c) {
    if constexpr (std::is_same_v<Scalar, double>) {
        constexpr double kQuarterPi = 0.785398163397448279;
        if (std::abs(x) <= kQuarterPi) {
            constexpr double S1 = -1.66666666666666324348e-01;
            constexpr double S2 = 8.33333333332248946124e-03;
            constexpr double S3 = -1.98412698298579493134e-04;
            constexpr double S4 = 2.75573137070700676789e-06;
            constexpr double S5 = -2.50507602534068634195e-08;
            constexpr double S6 = 1.58969099521155010221e-10;
            constexpr double C1 = 4.16666666666666019037e-02;
            constexpr double C2 = -1.38888888888741095749e-03;
            constexpr double C3 = 2.48015872894767294178e-05;
            constexpr double C4 = -2.75573143513906633035e-07;
            constexpr double C5 = 2.08757232129817482790e-09;
            constexpr double C6 = -1.13596475577881948265e-11;

            const double z = x * x;
            const double rs = S2 + z * (S3 + z * (S4 + z * (S5 + z * S6)));
            s = x + z * x * (S1 + z * rs);

            const double rc = z * (C1 + z * (C2 + z * (C3 + z * (C4 + z * (C5 + z * C6)))));
            if (std::abs(x) < 0.3) {
                c = 1.0 - (0.5 * z - z * rc);
            } else {
                // qx ~ |x|/4 with the low word cleared, so 1 - qx is exact.
                const double qx =
                    std::abs(x) > 0.78125
                        ? 0.28125
                        : std::bit_cast<double>((std::bit_cast<std::uint64_t>(std::abs(x)) - 0x0020000000000000ULL) &
                                                0xFFFFFFFF00000000ULL);
                const double hz = 0.5 * z - qx;
                c = (1.0 - qx) - (hz - z * rc);
            }
            return;
        }
    }
    using std::cos;
    using std::sin;
    s = sin(x);
    c = cos(x);
}

}  // namespace evolearn
