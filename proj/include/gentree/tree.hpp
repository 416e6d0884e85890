#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gentree {

/// Finite rooted planar tree. The root has index 0 and, for the ensembles in
/// this library, exactly one child. Storage is index-based (no per-node
/// allocation); child order is meaningful.
///
/// size() is the number of edges, i.e. the number of non-root vertices.
///
/// A vertex can be marked "open": its subtree exists in the underlying
/// infinite object but has not been generated (depth- or size-capped
/// sampling). Structural queries ignore the flag; generating-function code
/// uses it to bracket the missing part.
class Tree {
public:
    Tree() { clear(); }

    void clear() {
        parent_.assign(1, -1);
        first_child_.assign(1, -1);
        last_child_.assign(1, -1);
        next_sibling_.assign(1, -1);
        open_.assign(1, 0);
    }

    /// Appends a new vertex as the last child of `parent`; returns its index.
    std::int32_t add_child(std::int32_t parent);

    std::int32_t root() const { return 0; }
    std::int32_t num_vertices() const { return static_cast<std::int32_t>(parent_.size()); }
    std::int32_t size() const { return num_vertices() - 1; }   // edges

    std::int32_t parent(std::int32_t v) const { return parent_[static_cast<std::size_t>(v)]; }
    std::int32_t first_child(std::int32_t v) const { return first_child_[static_cast<std::size_t>(v)]; }
    std::int32_t next_sibling(std::int32_t v) const { return next_sibling_[static_cast<std::size_t>(v)]; }

    std::int32_t child_count(std::int32_t v) const;

    /// Vertex order sigma_v: child count plus one for the parent link.
    std::int32_t degree(std::int32_t v) const {
        return child_count(v) + (v == 0 ? 0 : 1);
    }

    std::int32_t depth(std::int32_t v) const;
    std::int32_t height() const;

    void mark_open(std::int32_t v) { open_[static_cast<std::size_t>(v)] = 1; }
    bool is_open(std::int32_t v) const { return open_[static_cast<std::size_t>(v)] != 0; }
    bool has_open() const;

    bool operator==(const Tree& o) const;

private:
    std::vector<std::int32_t> parent_, first_child_, last_child_, next_sibling_;
    std::vector<std::uint8_t> open_;
};

/// Subtree spanned by vertices at distance <= R from the root.
Tree ball(const Tree& tree, int R);

/// Number of vertices at distance exactly R from the root.
int profile(const Tree& tree, int R);

/// Depth-first balanced-parenthesis code of the subtree hanging below the
/// root edge; injective over planar rooted trees with root degree one.
std::string canonical_code(const Tree& tree);

/// Inverse of canonical_code. Throws std::invalid_argument on malformed input.
Tree decode_canonical(const std::string& code);

/// All planar rooted trees with root degree 1 and exactly N edges.
/// Guarded: N must be between 1 and 12.
std::vector<Tree> enumerate_trees(int N);

/// Convenience: the chain r - v_1 - ... - v_L.
Tree make_chain(int L);

/// Copies the subtree below src_vertex (children and deeper, in order,
/// open flags preserved) under dst vertex `at`.
void graft_below(Tree& dst, std::int32_t at, const Tree& src, std::int32_t src_vertex);

} // namespace gentree
