#include "mimoarq/conv_code.hpp"

#include <array>
#include <bit>
#include <limits>
#include <stdexcept>

namespace mimoarq::coding {
namespace {

// reg holds the current input at bit 6 and the previous six inputs below it.
inline int parity(unsigned v) { return std::popcount(v) & 1; }

}  // namespace

std::vector<std::uint8_t> conv_encode(std::span<const std::uint8_t> bits) {
    std::vector<std::uint8_t> out;
    out.reserve(2 * bits.size());
    unsigned state = 0;
    for (std::uint8_t b : bits) {
        const unsigned reg = (static_cast<unsigned>(b & 1) << (kConstraint - 1)) | state;
        out.push_back(static_cast<std::uint8_t>(parity(reg & kGen0)));
        out.push_back(static_cast<std::uint8_t>(parity(reg & kGen1)));
        state = reg >> 1;
    }
    return out;
}

std::vector<std::uint8_t> viterbi_decode(std::span<const double> llr) {
    if (llr.size() % 2 != 0) {
        throw std::invalid_argument("viterbi_decode: coded length must be even");
    }
    const std::size_t steps = llr.size() / 2;
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    std::array<std::array<std::uint8_t, 2>, kStates * 2> outputs{};
    for (unsigned state = 0; state < kStates; ++state) {
        for (unsigned b = 0; b < 2; ++b) {
            const unsigned reg = (b << (kConstraint - 1)) | state;
            outputs[state * 2 + b] = {static_cast<std::uint8_t>(parity(reg & kGen0)),
                                      static_cast<std::uint8_t>(parity(reg & kGen1))};
        }
    }

    std::array<double, kStates> metric;
    metric.fill(kNegInf);
    metric[0] = 0.0;
    // survivor[t][s] = predecessor state of s at step t.
    std::vector<std::array<std::uint8_t, kStates>> survivor(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        const double l0 = llr[2 * t];
        const double l1 = llr[2 * t + 1];
        std::array<double, kStates> next;
        next.fill(kNegInf);
        for (unsigned state = 0; state < kStates; ++state) {
            if (metric[state] == kNegInf) {
                continue;
            }
            for (unsigned b = 0; b < 2; ++b) {
                const auto& o = outputs[state * 2 + b];
                const double branch = (o[0] ? -l0 : l0) + (o[1] ? -l1 : l1);
                const unsigned ns = ((b << (kConstraint - 1)) | state) >> 1;
                const double cand = metric[state] + branch;
                if (cand > next[ns]) {
                    next[ns] = cand;
                    survivor[t][ns] = static_cast<std::uint8_t>(state);
                }
            }
        }
        metric = next;
    }

    std::vector<std::uint8_t> decoded(steps);
    unsigned state = 0;
    for (std::size_t t = steps; t-- > 0;) {
        // The input bit that led into `state` is its top bit.
        decoded[t] = static_cast<std::uint8_t>((state >> (kConstraint - 2)) & 1);
        state = survivor[t][state];
    }
    return decoded;
}

BlockInterleaver::BlockInterleaver(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("interleaver dimensions must be positive");
    }
}

}  // namespace mimoarq::coding
