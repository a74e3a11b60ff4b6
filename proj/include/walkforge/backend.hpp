#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "walkforge/group.hpp"
#include "walkforge/hash.hpp"
#include "walkforge/quadform.hpp"

namespace walkforge {

// A walk backend binds a concrete group action to the walk engine:
//   step/accumulate apply one supporting-set generator in place,
//   key64 is the salted fold of the canonical encoding (hash input),
//   store_key is the exact canonical encoding (database key).
// Both backends below realize the regular action of G on itself, so set
// elements and group elements share one representation.

// Abstract finite abelian group, coordinates in Coord (uint64_t fast path
// when every invariant factor fits; cpp_int otherwise). Both produce
// bit-identical encodings and therefore identical walks.
template <typename Coord>
class AbstractWalkBackend {
public:
    using Element = std::vector<Coord>;

    AbstractWalkBackend(GroupSpec spec, const SupportingSet& gens, std::uint64_t salt = 0)
        : spec_(std::move(spec)), salt_(salt) {
        if constexpr (std::is_same_v<Coord, std::uint64_t>) {
            for (const Int& f : spec_.factors)
                if (f > (Int(1) << 63)) throw std::invalid_argument("factor too large for u64 backend");
        }
        for (const Int& f : spec_.factors) factors_.push_back(convert(f));
        for (const auto& g : gens.generators) {
            if (g.coords.size() != spec_.rank()) throw std::invalid_argument("generator rank mismatch");
            Element e;
            for (const Int& c : g.coords) e.push_back(convert(c));
            generators_.push_back(std::move(e));
        }
    }

    const GroupSpec& spec() const { return spec_; }
    std::uint64_t salt() const { return salt_; }
    std::size_t generator_count() const { return generators_.size(); }

    void step(Element& z, std::size_t i) const {
        const Element& g = generators_[i];
        for (std::size_t k = 0; k < z.size(); ++k) {
            z[k] += g[k];
            if (z[k] >= factors_[k]) z[k] -= factors_[k];
        }
    }

    void accumulate(Element& acc, std::size_t i) const { step(acc, i); }

    std::uint64_t key64(const Element& z) const {
        ByteFolder f(salt_);
        for (std::size_t k = 0; k < z.size(); ++k) append_coord_bytes(f, z[k], spec_.widths[k]);
        return f.finish();
    }

    std::string store_key(const Element& z) const {
        std::string out;
        out.reserve(spec_.encoded_size());
        for (std::size_t k = 0; k < z.size(); ++k) {
            Coord v = z[k];
            for (unsigned b = 0; b < spec_.widths[k]; ++b) {
                out.push_back(static_cast<char>(static_cast<std::uint8_t>(v & 0xFF)));
                v >>= 8;
            }
        }
        return out;
    }

    Element identity() const { return Element(spec_.rank(), Coord(0)); }

    Element add(const Element& a, const Element& b) const {
        Element out = a;
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] += b[k];
            if (out[k] >= factors_[k]) out[k] -= factors_[k];
        }
        return out;
    }

    Element negate(const Element& a) const {
        Element out = a;
        for (std::size_t k = 0; k < out.size(); ++k)
            if (out[k] != Coord(0)) out[k] = factors_[k] - out[k];
        return out;
    }

    Element random_element(Rng& rng) const {
        Element out;
        out.reserve(spec_.rank());
        for (const Coord& f : factors_) {
            if constexpr (std::is_same_v<Coord, std::uint64_t>)
                out.push_back(uniform_below_u64(rng, f));
            else
                out.push_back(uniform_below(rng, f));
        }
        return out;
    }

    bool equal(const Element& a, const Element& b) const { return a == b; }

    Element from_group(const GroupElement& g) const {
        Element out;
        for (const Int& c : g.coords) out.push_back(convert(c));
        return out;
    }

    GroupElement to_group(const Element& e) const {
        GroupElement g;
        for (const Coord& c : e) g.coords.push_back(Int(c));
        return g;
    }

    std::string describe(const Element& e) const { return to_string(to_group(e)); }

private:
    static Coord convert(const Int& v) {
        if constexpr (std::is_same_v<Coord, std::uint64_t>)
            return v.template convert_to<std::uint64_t>();
        else
            return v;
    }

    static void append_coord_bytes(ByteFolder& f, const Coord& v, unsigned width) {
        if constexpr (std::is_same_v<Coord, std::uint64_t>) {
            for (unsigned b = 0; b < width; ++b) f.push_byte(static_cast<std::uint8_t>(v >> (8 * b)));
        } else {
            Int t = v;
            for (unsigned b = 0; b < width; ++b) {
                f.push_byte(static_cast<std::uint8_t>(t & 0xFF));
                t >>= 8;
            }
        }
    }

    GroupSpec spec_;
    std::uint64_t salt_;
    std::vector<Coord> factors_;
    std::vector<Element> generators_;
};

inline bool fits_u64_backend(const GroupSpec& spec) {
    for (const Int& f : spec.factors)
        if (f > (Int(1) << 63)) return false;
    return true;
}

// Ideal class group backend: nodes and accumulators are reduced forms,
// one step composes with a fixed prime form.
class ClassWalkBackend {
public:
    using Element = QuadForm;

    ClassWalkBackend(const ClassGroupCtx& ctx, std::vector<QuadForm> gens, std::uint64_t salt = 0)
        : ctx_(&ctx), generators_(std::move(gens)), salt_(salt) {
        for (const auto& g : generators_)
            if (discriminant(g) != ctx.disc()) throw std::invalid_argument("generator discriminant mismatch");
    }

    const ClassGroupCtx& ctx() const { return *ctx_; }
    std::uint64_t salt() const { return salt_; }
    std::size_t generator_count() const { return generators_.size(); }

    void step(Element& z, std::size_t i) const { z = compose(z, generators_[i]); }
    void accumulate(Element& acc, std::size_t i) const { acc = compose(acc, generators_[i]); }

    std::uint64_t key64(const Element& z) const {
        ByteFolder f(salt_);
        f.push_u64(static_cast<std::uint64_t>(z.a));
        f.push_u64(static_cast<std::uint64_t>(z.b) + 0x8000000000000000ull);
        f.push_u64(static_cast<std::uint64_t>(z.c));
        return f.finish();
    }

    std::string store_key(const Element& z) const {
        const auto bytes = walkforge::encode(z);
        return std::string(bytes.begin(), bytes.end());
    }

    Element identity() const { return ctx_->one(); }
    Element add(const Element& a, const Element& b) const { return compose(a, b); }
    Element negate(const Element& a) const { return invert(a); }
    Element random_element(Rng& rng) const { return ctx_->random_class(rng); }
    bool equal(const Element& a, const Element& b) const { return a == b; }
    std::string describe(const Element& e) const { return to_string(e); }

private:
    const ClassGroupCtx* ctx_;
    std::vector<QuadForm> generators_;
    std::uint64_t salt_;
};

}  // namespace walkforge
