#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "mimoarq/channel.hpp"

namespace mimoarq {

/// Enumerated transmit vectors. Vector i carries the bit label `labels[i]`,
/// bit b of the label being the b-th bit fed to the mapper.
struct SymbolSet {
    std::vector<CVector> vectors;
    std::vector<std::uint32_t> labels;
    int bits_per_vector = 0;

    int size() const { return static_cast<int>(vectors.size()); }
};

namespace modulation {

/// Gray QPSK: (b0, b1) -> ((1 - 2 b0) + i (1 - 2 b1)) / sqrt(2).
std::complex<double> qpsk_point(int b0, int b1);

/// Maps an even number of bits to symbols; odd counts are rejected.
std::vector<std::complex<double>> qpsk_map(std::span<const std::uint8_t> bits);

/// Hard decision by quadrant.
std::vector<std::uint8_t> qpsk_demap(std::span<const std::complex<double>> symbols);

/// All 4^K QPSK vectors; vector i has label i.
SymbolSet qpsk_symbol_set(int k);

/// All 2^K BPSK vectors (+1 for bit 0); vector i has label i.
SymbolSet bpsk_symbol_set(int k);

}  // namespace modulation
}  // namespace mimoarq
