#pragma once

#include <array>

namespace combrc {

/// Four-level alphabet of the channel equalisation task.
inline constexpr std::array<int, 4> kSymbolAlphabet{-3, -1, 1, 3};

/// Nearest alphabet symbol; ties go to the smaller symbol.
inline int quantize_symbol(double y)
{
    if (y <= -2.0)
        return -3;
    if (y <= 0.0)
        return -1;
    if (y <= 2.0)
        return 1;
    return 3;
}

}  // namespace combrc
