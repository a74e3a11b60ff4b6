#include "walkforge/group.hpp"

#include <sstream>
#include <stdexcept>

#include "walkforge/numeric.hpp"

namespace walkforge {

namespace {

unsigned coord_width(const Int& n) {
    const Int top = n - 1;
    const unsigned bits = top == 0 ? 1 : static_cast<unsigned>(msb(top)) + 1;
    return (bits + 7) / 8;
}

void check_member(const GroupElement& a, const GroupSpec& spec) {
    if (a.coords.size() != spec.rank()) throw std::invalid_argument("element rank mismatch");
    for (std::size_t i = 0; i < spec.rank(); ++i)
        if (a.coords[i] < 0 || a.coords[i] >= spec.factors[i])
            throw std::invalid_argument("coordinate out of range");
}

}  // namespace

unsigned GroupSpec::log2_ceil() const {
    if (order <= 1) return 0;
    const Int top = order - 1;
    return static_cast<unsigned>(msb(top)) + 1;  // ceil(log2 n) for n >= 2
}

std::size_t GroupSpec::encoded_size() const {
    std::size_t total = 0;
    for (unsigned w : widths) total += w;
    return total;
}

GroupSpec make_group(std::vector<Int> invariant_factors) {
    if (invariant_factors.empty()) throw std::invalid_argument("empty invariant factor list");
    GroupSpec spec;
    spec.order = 1;
    for (std::size_t i = 0; i < invariant_factors.size(); ++i) {
        const Int& f = invariant_factors[i];
        if (f < 2) throw std::invalid_argument("invariant factor < 2");
        if (i + 1 < invariant_factors.size() && invariant_factors[i] % invariant_factors[i + 1] != 0)
            throw std::invalid_argument("invariant factors must form a divisibility chain");
        spec.order *= f;
    }
    spec.factors = std::move(invariant_factors);
    spec.widths.reserve(spec.factors.size());
    for (const Int& f : spec.factors) spec.widths.push_back(coord_width(f));
    return spec;
}

GroupElement identity(const GroupSpec& spec) {
    return GroupElement{std::vector<Int>(spec.rank(), Int(0))};
}

GroupElement op(const GroupElement& a, const GroupElement& b, const GroupSpec& spec) {
    check_member(a, spec);
    check_member(b, spec);
    GroupElement out = a;
    for (std::size_t i = 0; i < spec.rank(); ++i) {
        out.coords[i] += b.coords[i];
        if (out.coords[i] >= spec.factors[i]) out.coords[i] -= spec.factors[i];
    }
    return out;
}

GroupElement inverse(const GroupElement& a, const GroupSpec& spec) {
    check_member(a, spec);
    GroupElement out = a;
    for (std::size_t i = 0; i < spec.rank(); ++i)
        if (out.coords[i] != 0) out.coords[i] = spec.factors[i] - out.coords[i];
    return out;
}

GroupElement pow(const GroupElement& a, const Int& e, const GroupSpec& spec) {
    check_member(a, spec);
    GroupElement out = identity(spec);
    for (std::size_t i = 0; i < spec.rank(); ++i) {
        Int c = (a.coords[i] * e) % spec.factors[i];
        if (c < 0) c += spec.factors[i];
        out.coords[i] = c;
    }
    return out;
}

GroupElement random_element(const GroupSpec& spec, Rng& rng) {
    GroupElement out;
    out.coords.reserve(spec.rank());
    for (const Int& f : spec.factors) out.coords.push_back(uniform_below(rng, f));
    return out;
}

bool is_member(const GroupElement& a, const GroupSpec& spec) {
    if (a.coords.size() != spec.rank()) return false;
    for (std::size_t i = 0; i < spec.rank(); ++i)
        if (a.coords[i] < 0 || a.coords[i] >= spec.factors[i]) return false;
    return true;
}

bool generates(const GroupSpec& spec, const SupportingSet& gens) {
    if (gens.generators.empty()) throw std::invalid_argument("empty supporting set");
    const std::size_t s = spec.rank();
    std::vector<std::vector<Int>> rows;
    rows.reserve(gens.generators.size() + s);
    for (const auto& g : gens.generators) {
        check_member(g, spec);
        rows.push_back(g.coords);
    }
    for (std::size_t i = 0; i < s; ++i) {
        std::vector<Int> row(s, Int(0));
        row[i] = spec.factors[i];
        rows.push_back(std::move(row));
    }
    return lattice_index(std::move(rows), s) == 1;
}

std::vector<std::uint8_t> encode(const GroupElement& a, const GroupSpec& spec) {
    check_member(a, spec);
    std::vector<std::uint8_t> out;
    out.reserve(spec.encoded_size());
    for (std::size_t i = 0; i < spec.rank(); ++i) {
        const unsigned w = spec.widths[i];
        Int v = a.coords[i];
        for (unsigned b = 0; b < w; ++b) {
            out.push_back(static_cast<std::uint8_t>(v & 0xFF));
            v >>= 8;
        }
    }
    return out;
}

std::string to_string(const GroupElement& a) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < a.coords.size(); ++i) {
        if (i) os << ',';
        os << a.coords[i];
    }
    os << ')';
    return os.str();
}

}  // namespace walkforge
