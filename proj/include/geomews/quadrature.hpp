#pragma once

#include <array>

namespace geomews::detail {

// 8-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 8> kGl8x{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                             -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                             0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGl8w{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                             0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                             0.2223810344533745, 0.1012285362903763};
inline constexpr std::array<double, 4> kGl4x{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                             0.8611363115940526};
inline constexpr std::array<double, 4> kGl4w{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                             0.3478548451374538};

}  // namespace geomews::detail
