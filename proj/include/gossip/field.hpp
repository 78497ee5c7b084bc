#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gossip/rng.hpp"

namespace gossip {

using FieldElem = std::uint16_t;
using CoeffVector = std::vector<FieldElem>;
using Payload = std::vector<std::uint8_t>;

// GF(2^m) for m in {1, 8, 16}. Addition is XOR; multiplication is carry-less
// polynomial multiplication reduced by a fixed irreducible polynomial per m.
class Field {
public:
    static constexpr std::uint32_t kPolyGf2 = 0x3;        // x + 1
    static constexpr std::uint32_t kPolyGf256 = 0x11B;    // x^8 + x^4 + x^3 + x + 1
    static constexpr std::uint32_t kPolyGf65536 = 0x1100B;  // x^16 + x^12 + x^3 + x + 1

    explicit Field(unsigned degree) : Field(degree, fixed_polynomial(degree)) {}

    Field(unsigned degree, std::uint32_t reduction_poly)
        : m_(degree), poly_(reduction_poly) {
        if (reduction_poly != fixed_polynomial(degree))
            throw std::invalid_argument("unsupported reduction polynomial for GF(2^m)");
        mask_ = static_cast<std::uint32_t>((1ULL << m_) - 1);
    }

    unsigned degree() const { return m_; }
    std::uint32_t reduction_poly() const { return poly_; }
    std::uint64_t order() const { return 1ULL << m_; }

    static FieldElem add(FieldElem a, FieldElem b) { return a ^ b; }

    FieldElem mul(FieldElem a, FieldElem b) const {
        std::uint32_t x = a, y = b, acc = 0;
        const std::uint32_t high = 1U << (m_ - 1);
        while (x && y) {
            if (y & 1U) acc ^= x;
            y >>= 1;
            if (x & high)
                x = ((x << 1) ^ poly_) & mask_;
            else
                x <<= 1;
        }
        return static_cast<FieldElem>(acc);
    }

    FieldElem pow(FieldElem a, std::uint64_t e) const {
        FieldElem result = 1, base = a;
        while (e) {
            if (e & 1ULL) result = mul(result, base);
            base = mul(base, base);
            e >>= 1;
        }
        return result;
    }

    // Multiplicative inverse via a^(q-2); a must be nonzero.
    FieldElem inv(FieldElem a) const {
        if (a == 0) throw std::invalid_argument("zero has no multiplicative inverse");
        return pow(a, order() - 2);
    }

    FieldElem sample(Rng& rng) const {
        return static_cast<FieldElem>(rng.bits(m_));
    }

    bool valid(FieldElem a) const { return (a & ~mask_) == 0; }

private:
    static std::uint32_t fixed_polynomial(unsigned degree) {
        switch (degree) {
            case 1: return kPolyGf2;
            case 8: return kPolyGf256;
            case 16: return kPolyGf65536;
            default: throw std::invalid_argument("field degree must be 1, 8, or 16");
        }
    }

    unsigned m_;
    std::uint32_t poly_;
    std::uint32_t mask_;
};

// Coded packet: coefficient header plus the combined payload it describes.
struct CodedPacket {
    CoeffVector coeffs;
    Payload payload;

    bool operator==(const CodedPacket&) const = default;
};

inline bool is_zero(const CoeffVector& v) {
    for (FieldElem e : v)
        if (e != 0) return false;
    return true;
}

inline FieldElem dot(const Field& f, const CoeffVector& u, const CoeffVector& v) {
    if (u.size() != v.size())
        throw std::invalid_argument("dot: coefficient vectors differ in length");
    FieldElem acc = 0;
    for (std::size_t i = 0; i < u.size(); ++i) acc = Field::add(acc, f.mul(u[i], v[i]));
    return acc;
}

// acc[i] += c * src[i], element-wise over the payload. For m = 16 adjacent
// byte pairs form one element (little-endian), so payloads must have even size.
inline void accumulate_scaled(const Field& f, Payload& acc, FieldElem c, const Payload& src) {
    if (acc.size() != src.size())
        throw std::invalid_argument("payload length mismatch");
    if (c == 0) return;
    switch (f.degree()) {
        case 1:
            for (std::size_t i = 0; i < src.size(); ++i) acc[i] ^= src[i];
            break;
        case 8:
            for (std::size_t i = 0; i < src.size(); ++i)
                acc[i] ^= static_cast<std::uint8_t>(f.mul(c, src[i]));
            break;
        case 16: {
            if (src.size() % 2 != 0)
                throw std::invalid_argument("GF(2^16) payloads must have even length");
            for (std::size_t i = 0; i + 1 < src.size(); i += 2) {
                const FieldElem e = static_cast<FieldElem>(src[i] | (src[i + 1] << 8));
                const FieldElem r = f.mul(c, e);
                acc[i] ^= static_cast<std::uint8_t>(r & 0xFF);
                acc[i + 1] ^= static_cast<std::uint8_t>(r >> 8);
            }
            break;
        }
        default:
            throw std::logic_error("unreachable");
    }
}

// A node's decoding state: stored innovative packets plus a reduced
// row-echelon copy for rank tracking. Rank is maintained per receipt;
// payload back-substitution runs only once rank reaches k.
class KnowledgeBasis {
public:
    KnowledgeBasis(const Field& f, std::size_t k) : field_(&f), k_(k) {}

    std::size_t message_count() const { return k_; }
    std::size_t rank() const { return echelon_.size(); }
    bool complete() const { return rank() == k_; }

    // Stored packets in arrival order; the basis random combinations draw from.
    const std::vector<CodedPacket>& packets() const { return packets_; }

    // Inserts a packet, returns true if it increased the rank.
    // Non-innovative packets are dropped from storage.
    bool absorb(const CodedPacket& p) {
        if (p.coeffs.size() != k_)
            throw std::invalid_argument("coefficient vector length differs from k");
        CodedPacket row = p;
        reduce(row);
        const int pivot = leading_index(row.coeffs);
        if (pivot < 0) return false;
        normalize(row, static_cast<std::size_t>(pivot));
        back_eliminate(row, static_cast<std::size_t>(pivot));
        insert_row(std::move(row), static_cast<std::size_t>(pivot));
        packets_.push_back(p);
        return true;
    }

    // Recovers the k original payloads; empty when rank < k.
    std::optional<std::vector<Payload>> try_decode() const {
        if (!complete()) return std::nullopt;
        std::vector<Payload> out(k_);
        for (const CodedPacket& row : echelon_) {
            const int pivot = leading_index(row.coeffs);
            out[static_cast<std::size_t>(pivot)] = row.payload;
        }
        return out;
    }

private:
    static int leading_index(const CoeffVector& v) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] != 0) return static_cast<int>(i);
        return -1;
    }

    void reduce(CodedPacket& row) const {
        for (const CodedPacket& r : echelon_) {
            const int pivot = leading_index(r.coeffs);
            const FieldElem c = row.coeffs[static_cast<std::size_t>(pivot)];
            if (c == 0) continue;
            for (std::size_t i = 0; i < k_; ++i)
                row.coeffs[i] = Field::add(row.coeffs[i], field_->mul(c, r.coeffs[i]));
            accumulate_scaled(*field_, row.payload, c, r.payload);
        }
    }

    void normalize(CodedPacket& row, std::size_t pivot) const {
        const FieldElem lead = row.coeffs[pivot];
        if (lead == 1) return;
        const FieldElem s = field_->inv(lead);
        for (std::size_t i = 0; i < k_; ++i) row.coeffs[i] = field_->mul(s, row.coeffs[i]);
        Payload scaled(row.payload.size(), 0);
        accumulate_scaled(*field_, scaled, s, row.payload);
        row.payload = std::move(scaled);
    }

    void back_eliminate(const CodedPacket& row, std::size_t pivot) {
        for (CodedPacket& r : echelon_) {
            const FieldElem c = r.coeffs[pivot];
            if (c == 0) continue;
            for (std::size_t i = 0; i < k_; ++i)
                r.coeffs[i] = Field::add(r.coeffs[i], field_->mul(c, row.coeffs[i]));
            accumulate_scaled(*field_, r.payload, c, row.payload);
        }
    }

    void insert_row(CodedPacket row, std::size_t pivot) {
        auto pos = echelon_.begin();
        while (pos != echelon_.end() &&
               leading_index(pos->coeffs) < static_cast<int>(pivot))
            ++pos;
        echelon_.insert(pos, std::move(row));
    }

    const Field* field_;
    std::size_t k_;
    std::vector<CodedPacket> packets_;
    std::vector<CodedPacket> echelon_;
};

// Dimension of the span of the given vectors; inputs are not modified.
// Echelon rows are kept sorted by pivot so forward elimination never
// reintroduces an already-cleared column.
inline std::size_t rank_of(const Field& f, std::span<const CoeffVector> vectors) {
    if (vectors.empty()) return 0;
    const std::size_t k = vectors.front().size();
    std::vector<std::pair<std::size_t, CoeffVector>> echelon;  // (pivot, row)
    for (const CoeffVector& v : vectors) {
        if (v.size() != k)
            throw std::invalid_argument("rank: coefficient vectors differ in length");
        CoeffVector row = v;
        for (const auto& [rp, r] : echelon) {
            const FieldElem c = row[rp];
            if (c == 0) continue;
            for (std::size_t i = rp; i < k; ++i) row[i] = Field::add(row[i], f.mul(c, r[i]));
        }
        std::size_t pivot = 0;
        while (pivot < k && row[pivot] == 0) ++pivot;
        if (pivot == k) continue;
        const FieldElem s = f.inv(row[pivot]);
        for (std::size_t i = pivot; i < k; ++i) row[i] = f.mul(s, row[i]);
        auto pos = echelon.begin();
        while (pos != echelon.end() && pos->first < pivot) ++pos;
        echelon.insert(pos, {pivot, std::move(row)});
    }
    return echelon.size();
}

// Gaussian-elimination decode of a packet list; empty when the packets do
// not span all k messages.
inline std::optional<std::vector<Payload>> decode(const Field& f,
                                                  std::span<const CodedPacket> packets,
                                                  std::size_t k) {
    KnowledgeBasis basis(f, k);
    for (const CodedPacket& p : packets) basis.absorb(p);
    return basis.try_decode();
}

// Uniformly random linear combination of the basis packets: one independent
// uniform coefficient per stored packet. An empty basis yields the zero packet.
inline CodedPacket random_combination(Rng& rng, const Field& f,
                                      std::span<const CodedPacket> basis,
                                      std::size_t k, std::size_t payload_size) {
    CodedPacket out{CoeffVector(k, 0), Payload(payload_size, 0)};
    for (const CodedPacket& p : basis) {
        if (p.coeffs.size() != k)
            throw std::invalid_argument("basis coefficient vector length differs from k");
        const FieldElem c = f.sample(rng);
        if (c == 0) continue;
        for (std::size_t i = 0; i < k; ++i)
            out.coeffs[i] = Field::add(out.coeffs[i], f.mul(c, p.coeffs[i]));
        accumulate_scaled(f, out.payload, c, p.payload);
    }
    return out;
}

}  // namespace gossip
