#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace geostop {

using Symbol = std::uint64_t;
using Word = std::vector<Symbol>;

// The shift-compatibility condition behind the period quantities: some
// sequence can start with `a` while also carrying `b` from offset k, i.e.
// a[k+j] == b[j] wherever both constrain the same coordinate.
bool compatible_at_shift(std::span<const Symbol> a, std::span<const Symbol> b, std::size_t k);

// Least k in [1, n] at which the word is compatible with its own shift;
// equals n minus the longest proper border (computed via the border array).
std::size_t self_period(std::span<const Symbol> w);

// Least k in [0, min(n, m)] at which the two words are compatible in either
// direction; k = min(n, m) always qualifies.
std::size_t cross_period(std::span<const Symbol> a, std::span<const Symbol> b);

// min{cross_period(a,b), self_period(a), self_period(b)} - the overlap scale
// in the shift theorem's error term.
std::size_t kappa(std::span<const Symbol> a, std::span<const Symbol> b);

}  // namespace geostop
