#include "ewens/tree.hpp"

#include "ewens/errors.hpp"

#include <algorithm>
#include <deque>

namespace ewens {

TreeAddress TreeAddress::parent() const {
    if (is_root()) throw StructureError("root has no parent");
    std::vector<std::uint32_t> p(path.begin(), path.end() - 1);
    return TreeAddress(std::move(p));
}

TreeAddress TreeAddress::child(std::uint32_t index) const {
    std::vector<std::uint32_t> p = path;
    p.push_back(index);
    return TreeAddress(std::move(p));
}

std::string TreeAddress::str() const {
    if (is_root()) return "root";
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(path[i]);
    }
    return s;
}

TreeRegion::TreeRegion(unsigned k_) : k(k_) {
    if (k == 0) throw DomainError("branching parameter k must be >= 1");
}

TreeRegion::TreeRegion(unsigned k_, std::set<TreeAddress> vs) : TreeRegion(k_) {
    for (const auto& v : vs) {
        if (!valid_address(v))
            throw StructureError("address " + v.str() + " is not on the (k+1)-regular tree with k=" + std::to_string(k));
    }
    vertices = std::move(vs);
}

void TreeRegion::insert(const TreeAddress& v) {
    if (!valid_address(v))
        throw StructureError("address " + v.str() + " is not on the (k+1)-regular tree with k=" + std::to_string(k));
    vertices.insert(v);
}

bool TreeRegion::valid_address(const TreeAddress& v) const {
    for (std::size_t i = 0; i < v.path.size(); ++i) {
        std::uint32_t limit = (i == 0) ? k + 1 : k;  // root fans out to k+1 children
        if (v.path[i] >= limit) return false;
    }
    return true;
}

std::vector<TreeAddress> TreeRegion::neighbors(const TreeAddress& v) const {
    std::vector<TreeAddress> out;
    if (!v.is_root()) out.push_back(v.parent());
    std::uint32_t fanout = v.is_root() ? k + 1 : k;
    for (std::uint32_t c = 0; c < fanout; ++c) out.push_back(v.child(c));
    return out;
}

bool TreeRegion::adjacent(const TreeAddress& a, const TreeAddress& b) const {
    auto is_parent_of = [](const TreeAddress& p, const TreeAddress& c) {
        return c.path.size() == p.path.size() + 1 &&
               std::equal(p.path.begin(), p.path.end(), c.path.begin());
    };
    return is_parent_of(a, b) || is_parent_of(b, a);
}

bool TreeRegion::connected() const {
    if (vertices.size() <= 1) return true;
    std::set<TreeAddress> seen;
    std::deque<TreeAddress> frontier{*vertices.begin()};
    seen.insert(*vertices.begin());
    while (!frontier.empty()) {
        TreeAddress cur = frontier.front();
        frontier.pop_front();
        for (const auto& nb : neighbors(cur)) {
            if (contains(nb) && seen.insert(nb).second) frontier.push_back(nb);
        }
    }
    return seen.size() == vertices.size();
}

TreeRegion build_ball(unsigned k, unsigned r) {
    TreeRegion region(k);
    region.insert(TreeAddress{});
    std::vector<TreeAddress> level{TreeAddress{}};
    for (unsigned depth = 0; depth < r; ++depth) {
        std::vector<TreeAddress> next;
        for (const auto& v : level) {
            std::uint32_t fanout = v.is_root() ? k + 1 : k;
            for (std::uint32_t c = 0; c < fanout; ++c) {
                TreeAddress child = v.child(c);
                region.insert(child);
                next.push_back(child);
            }
        }
        level = std::move(next);
    }
    return region;
}

std::set<TreeAddress> outer_boundary(const TreeRegion& region) {
    std::set<TreeAddress> boundary;
    for (const auto& v : region.vertices)
        for (const auto& nb : region.neighbors(v))
            if (!region.contains(nb)) boundary.insert(nb);
    return boundary;
}

GrowthStep growth_step(const TreeRegion& region, const TreeAddress& v) {
    if (!region.valid_address(v))
        throw StructureError("address " + v.str() + " is not on the tree with k=" + std::to_string(region.k));
    if (region.contains(v)) throw StructureError("vertex " + v.str() + " is already in the region");
    std::vector<TreeAddress> anchors;
    for (const auto& nb : region.neighbors(v))
        if (region.contains(nb)) anchors.push_back(nb);
    if (anchors.empty()) throw StructureError("vertex " + v.str() + " has no neighbor in the region");
    // Unique for connected regions; documented tie-break otherwise.
    TreeAddress anchor = *std::min_element(anchors.begin(), anchors.end());
    return GrowthStep{region, v, anchor};
}

SpinConfiguration::SpinConfiguration(TreeRegion region_) : region(std::move(region_)) {
    if (!region.vertices.empty())
        throw ConstraintError("nonempty region needs spins for each vertex");
}

SpinConfiguration::SpinConfiguration(TreeRegion region_, std::map<TreeAddress, int> spins_)
    : region(std::move(region_)), spins(std::move(spins_)) {
    if (spins.size() != region.size())
        throw ConstraintError("configuration must assign exactly one spin per vertex");
    for (const auto& [v, s] : spins) {
        (void)s;
        if (!region.contains(v))
            throw ConstraintError("spin assigned outside the region at " + v.str());
    }
}

SpinConfiguration SpinConfiguration::from_values(TreeRegion region, const std::vector<int>& values) {
    if (values.size() != region.size())
        throw ConstraintError("value list length must match region size");
    std::map<TreeAddress, int> spins;
    std::size_t i = 0;
    for (const auto& v : region.vertices) spins[v] = values[i++];
    return SpinConfiguration(std::move(region), std::move(spins));
}

int SpinConfiguration::spin_at(const TreeAddress& v) const {
    auto it = spins.find(v);
    if (it == spins.end()) throw MissingEntryError("no spin at vertex " + v.str());
    return it->second;
}

std::vector<int> SpinConfiguration::values() const {
    std::vector<int> out;
    out.reserve(spins.size());
    for (const auto& [v, s] : spins) {
        (void)v;
        out.push_back(s);
    }
    return out;
}

SpinConfiguration extend_configuration(const SpinConfiguration& sigma, const TreeAddress& v, int s) {
    if (sigma.region.contains(v))
        throw StructureError("vertex " + v.str() + " already carries a spin");
    TreeRegion region = sigma.region;
    region.insert(v);
    std::map<TreeAddress, int> spins = sigma.spins;
    spins[v] = s;
    return SpinConfiguration(std::move(region), std::move(spins));
}

SpinConfiguration restrict_configuration(const SpinConfiguration& sigma, const TreeRegion& sub) {
    std::map<TreeAddress, int> spins;
    for (const auto& v : sub.vertices) {
        if (!sigma.region.contains(v))
            throw StructureError("restriction target contains " + v.str() + " outside the domain");
        spins[v] = sigma.spin_at(v);
    }
    return SpinConfiguration(sub, std::move(spins));
}

std::vector<TreeRegion> connected_subregions(const TreeRegion& within, std::size_t max_size) {
    std::vector<TreeAddress> verts(within.vertices.begin(), within.vertices.end());
    std::vector<TreeRegion> out;
    std::set<std::set<TreeAddress>> seen;
    // Grow connected sets from each start vertex; dedupe globally.
    std::deque<std::set<TreeAddress>> queue;
    for (const auto& v : verts) {
        std::set<TreeAddress> single{v};
        if (seen.insert(single).second) queue.push_back(single);
    }
    while (!queue.empty()) {
        std::set<TreeAddress> cur = queue.front();
        queue.pop_front();
        out.emplace_back(within.k, cur);
        if (cur.size() >= max_size) continue;
        for (const auto& member : cur) {
            for (const auto& nb : within.neighbors(member)) {
                if (!within.contains(nb) || cur.count(nb)) continue;
                std::set<TreeAddress> bigger = cur;
                bigger.insert(nb);
                if (seen.insert(bigger).second) queue.push_back(bigger);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace ewens
