#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace ewens {

// Vertex of the (k+1)-regular tree, addressed by its child-index path from a
// distinguished root. The root has k+1 children (first index in 0..k), every
// other vertex has k children (indices in 0..k-1) plus its parent, so all
// degrees are k+1.
struct TreeAddress {
    std::vector<std::uint32_t> path;

    TreeAddress() = default;
    explicit TreeAddress(std::vector<std::uint32_t> p) : path(std::move(p)) {}

    bool is_root() const { return path.empty(); }
    std::size_t depth() const { return path.size(); }
    TreeAddress parent() const;  // throws StructureError at the root
    TreeAddress child(std::uint32_t index) const;

    std::string str() const;  // "root" or "0.1.0"

    auto operator<=>(const TreeAddress&) const = default;
};

// Finite set of vertices on the tree with branching parameter k.
struct TreeRegion {
    unsigned k = 2;
    std::set<TreeAddress> vertices;

    TreeRegion() = default;
    explicit TreeRegion(unsigned k);
    TreeRegion(unsigned k, std::set<TreeAddress> vertices);

    bool contains(const TreeAddress& v) const { return vertices.count(v) != 0; }
    std::size_t size() const { return vertices.size(); }
    void insert(const TreeAddress& v);  // validates the address against k

    bool valid_address(const TreeAddress& v) const;
    std::vector<TreeAddress> neighbors(const TreeAddress& v) const;
    bool adjacent(const TreeAddress& a, const TreeAddress& b) const;
    bool connected() const;  // empty and singleton regions count as connected

    auto operator<=>(const TreeRegion&) const = default;
};

// All vertices at distance <= r from the root.
TreeRegion build_ball(unsigned k, unsigned r);

// Outer boundary: vertices outside the region adjacent to some member.
std::set<TreeAddress> outer_boundary(const TreeRegion& region);

// One-vertex extension Delta = Lambda + {v} with its anchor u, the
// region-side endpoint of the connecting edge.
struct GrowthStep {
    TreeRegion base;      // Lambda
    TreeAddress added;    // v, outside Lambda
    TreeAddress anchor;   // u in Lambda with <u,v> an edge
};

// Resolves the anchor of v over the region. If v has several neighbors in a
// disconnected region, the lexicographically smallest is chosen.
// Throws StructureError when v is already in the region or detached from it.
GrowthStep growth_step(const TreeRegion& region, const TreeAddress& v);

// Spin assignment on a region; every vertex carries exactly one spin.
struct SpinConfiguration {
    TreeRegion region;
    std::map<TreeAddress, int> spins;

    SpinConfiguration() = default;
    explicit SpinConfiguration(TreeRegion region);
    SpinConfiguration(TreeRegion region, std::map<TreeAddress, int> spins);

    // Spins listed in vertex order (ascending address).
    static SpinConfiguration from_values(TreeRegion region, const std::vector<int>& values);

    int spin_at(const TreeAddress& v) const;  // throws MissingEntryError
    std::size_t size() const { return region.size(); }
    std::vector<int> values() const;  // in vertex order

    auto operator<=>(const SpinConfiguration&) const = default;
};

// sigma on Lambda + {v} agreeing with sigma on Lambda and carrying s at v.
SpinConfiguration extend_configuration(const SpinConfiguration& sigma, const TreeAddress& v, int s);

// Restriction of sigma to a subregion of its domain.
SpinConfiguration restrict_configuration(const SpinConfiguration& sigma, const TreeRegion& sub);

// Connected subregions of `within` having at most max_size vertices,
// in a deterministic order. Intended for exhaustive desk-scale sweeps.
std::vector<TreeRegion> connected_subregions(const TreeRegion& within, std::size_t max_size);

}  // namespace ewens
