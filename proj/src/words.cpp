#include "geostop/words.hpp"

#include <algorithm>
#include <stdexcept>

namespace geostop {

bool compatible_at_shift(std::span<const Symbol> a, std::span<const Symbol> b, std::size_t k) {
    if (k >= a.size()) return true;  // no shared coordinates
    const std::size_t overlap = std::min(b.size(), a.size() - k);
    for (std::size_t j = 0; j < overlap; ++j)
        if (a[k + j] != b[j]) return false;
    return true;
}

std::size_t self_period(std::span<const Symbol> w) {
    if (w.empty()) throw std::invalid_argument("self_period: empty word");
    const std::size_t n = w.size();
    // border (failure-function) array; the longest proper border of the whole
    // word determines the least period n - border[n-1].
    std::vector<std::size_t> border(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t b = border[i - 1];
        while (b > 0 && w[i] != w[b]) b = border[b - 1];
        if (w[i] == w[b]) ++b;
        border[i] = b;
    }
    return n - border[n - 1];
}

std::size_t cross_period(std::span<const Symbol> a, std::span<const Symbol> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("cross_period: empty word");
    const std::size_t cap = std::min(a.size(), b.size());
    for (std::size_t k = 0; k < cap; ++k)
        if (compatible_at_shift(a, b, k) || compatible_at_shift(b, a, k)) return k;
    return cap;
}

std::size_t kappa(std::span<const Symbol> a, std::span<const Symbol> b) {
    return std::min({cross_period(a, b), self_period(a), self_period(b)});
}

}  // namespace geostop
