#include "qram/query.hpp"

#include <cmath>
#include <stdexcept>

namespace qram {

MemoryTable MemoryTable::zeros(const TreeSpec& spec, int m) {
    spec.check();
    if (m < 0) throw std::invalid_argument("m must be >= 0");
    MemoryTable t;
    t.n = spec.n;
    t.m = m;
    t.k = spec.k;
    t.words.assign(size_t{1} << (m + spec.n), 0);
    return t;
}

MemoryTable MemoryTable::random(const TreeSpec& spec, int m, Rng& rng) {
    MemoryTable t = zeros(spec, m);
    const uint64_t mask = (spec.k >= 64) ? ~uint64_t{0} : ((uint64_t{1} << spec.k) - 1);
    for (auto& w : t.words) w = rng.next() & mask;
    return t;
}

QueryInput QueryInput::uniform_addresses(const TreeSpec& spec, int m) {
    QueryInput in;
    const uint64_t count = uint64_t{1} << (m + spec.n);
    const double amp = 1.0 / std::sqrt(static_cast<double>(count));
    in.branches.reserve(count);
    for (uint64_t v = 0; v < count; ++v)
        in.branches.push_back({v >> spec.n, v & ((uint64_t{1} << spec.n) - 1), 0, {amp, 0.0}});
    return in;
}

QueryInput QueryInput::random_superposition(const TreeSpec& spec, int m, Rng& rng) {
    QueryInput in;
    const uint64_t addresses = uint64_t{1} << (m + spec.n);
    const uint64_t words = uint64_t{1} << spec.k;
    for (uint64_t v = 0; v < addresses; ++v)
        for (uint64_t z = 0; z < words; ++z) {
            std::complex<double> a{rng.uniform() - 0.5, rng.uniform() - 0.5};
            in.branches.push_back(
                {v >> spec.n, v & ((uint64_t{1} << spec.n) - 1), z, a});
        }
    in.normalize();
    return in;
}

double QueryInput::norm2() const {
    double s = 0.0;
    for (const auto& b : branches) s += std::norm(b.amp);
    return s;
}

void QueryInput::normalize() {
    double s = norm2();
    if (s <= 0.0) throw std::invalid_argument("input has zero norm");
    const double inv = 1.0 / std::sqrt(s);
    for (auto& b : branches) b.amp *= inv;
}

}  // namespace qram
