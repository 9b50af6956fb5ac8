#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bsm/errors.hpp"

namespace bsm {

inline constexpr int kWordBits = 64;

constexpr int words_for_bits(int n_bits) {
    return (n_bits + kWordBits - 1) / kWordBits;
}

// Fixed-length bit string packed into 64-bit words, bit i at word i/64,
// position i%64. Bits past size() (the pad) are kept zero at all times so
// whole-word popcounts need no tail handling.
class BitString {
public:
    BitString() = default;
    explicit BitString(int n_bits)
        : n_bits_(n_bits), words_(static_cast<size_t>(words_for_bits(n_bits)), 0) {
        if (n_bits < 0) throw InvalidArgument("BitString: negative bit length");
    }

    // "1011" -> bit 0 set, bit 1 clear, bits 2,3 set.
    static BitString from_bits(std::string_view bits) {
        BitString out(static_cast<int>(bits.size()));
        for (size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1') {
                out.set(static_cast<int>(i));
            } else if (bits[i] != '0') {
                throw InvalidArgument("BitString::from_bits: expected only 0/1");
            }
        }
        return out;
    }

    int size() const { return n_bits_; }

    void set(int i) { words_[static_cast<size_t>(i >> 6)] |= uint64_t{1} << (i & 63); }
    void reset(int i) { words_[static_cast<size_t>(i >> 6)] &= ~(uint64_t{1} << (i & 63)); }
    bool test(int i) const {
        return (words_[static_cast<size_t>(i >> 6)] >> (i & 63)) & 1u;
    }

    std::span<const uint64_t> words() const { return words_; }
    std::span<uint64_t> words() { return words_; }

    int popcount() const {
        int total = 0;
        for (uint64_t w : words_) total += std::popcount(w);
        return total;
    }

    friend bool operator==(const BitString& a, const BitString& b) {
        return a.n_bits_ == b.n_bits_ && a.words_ == b.words_;
    }

private:
    int n_bits_ = 0;
    std::vector<uint64_t> words_;
};

// popcount((a ^ b) & m) over nwords words. Callers guarantee equal lengths
// and zeroed pads.
inline int masked_hamming_words(const uint64_t* a, const uint64_t* b,
                                const uint64_t* m, size_t nwords) {
    int total = 0;
    for (size_t i = 0; i < nwords; ++i) {
        total += std::popcount((a[i] ^ b[i]) & m[i]);
    }
    return total;
}

inline int hamming_words(const uint64_t* a, const uint64_t* b, size_t nwords) {
    int total = 0;
    for (size_t i = 0; i < nwords; ++i) {
        total += std::popcount(a[i] ^ b[i]);
    }
    return total;
}

}  // namespace bsm
