#include "mimoarq/modulation.hpp"

#include <cmath>
#include <stdexcept>

namespace mimoarq::modulation {

std::complex<double> qpsk_point(int b0, int b1) {
    constexpr double kInvSqrt2 = 0.70710678118654752440;
    return {kInvSqrt2 * (1 - 2 * b0), kInvSqrt2 * (1 - 2 * b1)};
}

std::vector<std::complex<double>> qpsk_map(std::span<const std::uint8_t> bits) {
    if (bits.size() % 2 != 0) {
        throw std::invalid_argument("qpsk_map: bit count must be even");
    }
    std::vector<std::complex<double>> out;
    out.reserve(bits.size() / 2);
    for (std::size_t i = 0; i < bits.size(); i += 2) {
        out.push_back(qpsk_point(bits[i] & 1, bits[i + 1] & 1));
    }
    return out;
}

std::vector<std::uint8_t> qpsk_demap(std::span<const std::complex<double>> symbols) {
    std::vector<std::uint8_t> out;
    out.reserve(2 * symbols.size());
    for (const auto& s : symbols) {
        out.push_back(s.real() < 0.0 ? 1 : 0);
        out.push_back(s.imag() < 0.0 ? 1 : 0);
    }
    return out;
}

SymbolSet qpsk_symbol_set(int k) {
    if (k < 1 || k > 15) {
        throw std::invalid_argument("qpsk_symbol_set: K must be in [1, 15]");
    }
    SymbolSet set;
    set.bits_per_vector = 2 * k;
    const std::uint32_t m = 1u << (2 * k);
    for (std::uint32_t label = 0; label < m; ++label) {
        CVector v(k);
        for (int s = 0; s < k; ++s) {
            v(s) = qpsk_point((label >> (2 * s)) & 1, (label >> (2 * s + 1)) & 1);
        }
        set.vectors.push_back(std::move(v));
        set.labels.push_back(label);
    }
    return set;
}

SymbolSet bpsk_symbol_set(int k) {
    if (k < 1 || k > 30) {
        throw std::invalid_argument("bpsk_symbol_set: K must be in [1, 30]");
    }
    SymbolSet set;
    set.bits_per_vector = k;
    const std::uint32_t m = 1u << k;
    for (std::uint32_t label = 0; label < m; ++label) {
        CVector v(k);
        for (int s = 0; s < k; ++s) {
            v(s) = ((label >> s) & 1) ? -1.0 : 1.0;
        }
        set.vectors.push_back(std::move(v));
        set.labels.push_back(label);
    }
    return set;
}

}  // namespace mimoarq::modulation
