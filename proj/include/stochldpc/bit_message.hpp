#pragma once

#include <cstdint>
#include <vector>

#include "stochldpc/kernels.hpp"

namespace stochldpc {

// Packed binary vector of length n_bits (the decoder uses length 2K).
// Position ell in 1..2K of the algorithm's notation maps to bit index
// ell-1 here; bit b of word w is index w*64 + b.
class BitMessage {
public:
    BitMessage() = default;
    explicit BitMessage(std::size_t n_bits)
        : n_bits_(n_bits), words_((n_bits + 63) / 64, 0) {}

    std::size_t n_bits() const { return n_bits_; }
    std::size_t n_words() const { return words_.size(); }
    std::uint64_t* words() { return words_.data(); }
    const std::uint64_t* words() const { return words_.data(); }

    bool get(std::size_t idx) const { return (words_[idx >> 6] >> (idx & 63)) & 1; }
    void set(std::size_t idx, bool v) {
        std::uint64_t m = 1ull << (idx & 63);
        if (v)
            words_[idx >> 6] |= m;
        else
            words_[idx >> 6] &= ~m;
    }

    // Zeroes bits at and above n_bits in the last word.
    void mask_tail() {
        if (n_bits_ & 63) words_.back() &= ~0ull >> (64 - (n_bits_ & 63));
    }

    std::uint64_t count_ones() const { return kern::backend().popcount(words(), n_words()); }
    std::uint64_t count_ones(std::size_t bit_lo, std::size_t bit_hi) const {
        return kern::popcount_bit_range(words(), bit_lo, bit_hi);
    }

    bool operator==(const BitMessage& o) const {
        return n_bits_ == o.n_bits_ && words_ == o.words_;
    }

private:
    std::size_t n_bits_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace stochldpc
