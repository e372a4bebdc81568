#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace mimoarq::coding {

/// Rate-1/2 feedforward convolutional code, constraint length 7, octal
/// generators (133, 171). Output order per input bit: g0 then g1.
inline constexpr int kConstraint = 7;
inline constexpr int kStates = 1 << (kConstraint - 1);
inline constexpr unsigned kGen0 = 0133;
inline constexpr unsigned kGen1 = 0171;
inline constexpr int kTailBits = kConstraint - 1;

/// Encodes `bits` from the zero state. Callers append kTailBits zeros to
/// terminate the trellis.
std::vector<std::uint8_t> conv_encode(std::span<const std::uint8_t> bits);

/// Soft-input Viterbi over a terminated trellis. `llr` holds one value per
/// coded bit, positive meaning bit 0 is more likely. Returns the decoded
/// input sequence including the tail.
std::vector<std::uint8_t> viterbi_decode(std::span<const double> llr);

/// Block interleaver: written row by row into rows x cols, read column by column.
class BlockInterleaver {
public:
    BlockInterleaver(int rows, int cols);

    int size() const { return rows_ * cols_; }
    template <typename T>
    std::vector<T> interleave(std::span<const T> in) const;
    template <typename T>
    std::vector<T> deinterleave(std::span<const T> in) const;

private:
    int rows_;
    int cols_;
};

template <typename T>
std::vector<T> BlockInterleaver::interleave(std::span<const T> in) const {
    if (static_cast<int>(in.size()) != size()) {
        throw std::invalid_argument("interleaver: length mismatch");
    }
    std::vector<T> out(in.size());
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) {
            out[static_cast<std::size_t>(c * rows_ + r)] = in[static_cast<std::size_t>(r * cols_ + c)];
        }
    }
    return out;
}

template <typename T>
std::vector<T> BlockInterleaver::deinterleave(std::span<const T> in) const {
    if (static_cast<int>(in.size()) != size()) {
        throw std::invalid_argument("interleaver: length mismatch");
    }
    std::vector<T> out(in.size());
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) {
            out[static_cast<std::size_t>(r * cols_ + c)] = in[static_cast<std::size_t>(c * rows_ + r)];
        }
    }
    return out;
}

}  // namespace mimoarq::coding
