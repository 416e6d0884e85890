#include "gentree/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace gentree {

std::int32_t Tree::add_child(std::int32_t parent) {
    if (parent < 0 || parent >= num_vertices())
        throw std::out_of_range("Tree::add_child: bad parent index");
    std::int32_t v = num_vertices();
    parent_.push_back(parent);
    first_child_.push_back(-1);
    last_child_.push_back(-1);
    next_sibling_.push_back(-1);
    open_.push_back(0);
    auto p = static_cast<std::size_t>(parent);
    if (first_child_[p] == -1) {
        first_child_[p] = v;
    } else {
        next_sibling_[static_cast<std::size_t>(last_child_[p])] = v;
    }
    last_child_[p] = v;
    return v;
}

std::int32_t Tree::child_count(std::int32_t v) const {
    std::int32_t n = 0;
    for (std::int32_t c = first_child(v); c != -1; c = next_sibling(c)) ++n;
    return n;
}

std::int32_t Tree::depth(std::int32_t v) const {
    std::int32_t d = 0;
    while (v != 0) {
        v = parent(v);
        ++d;
    }
    return d;
}

std::int32_t Tree::height() const {
    // Vertices are appended child-after-parent, so a single forward pass works.
    std::vector<std::int32_t> d(static_cast<std::size_t>(num_vertices()), 0);
    std::int32_t h = 0;
    for (std::int32_t v = 1; v < num_vertices(); ++v) {
        d[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(parent(v))] + 1;
        h = std::max(h, d[static_cast<std::size_t>(v)]);
    }
    return h;
}

bool Tree::has_open() const {
    return std::any_of(open_.begin(), open_.end(), [](std::uint8_t b) { return b != 0; });
}

namespace {

void encode_from(const Tree& t, std::int32_t v, std::string& out) {
    out.push_back('(');
    for (std::int32_t c = t.first_child(v); c != -1; c = t.next_sibling(c)) encode_from(t, c, out);
    out.push_back(')');
}

} // namespace

bool Tree::operator==(const Tree& o) const {
    if (num_vertices() != o.num_vertices()) return false;
    std::string a, b;
    encode_from(*this, 0, a);
    encode_from(o, 0, b);
    return a == b;
}

Tree ball(const Tree& tree, int R) {
    if (R < 0) throw std::invalid_argument("ball: R must be >= 0");
    Tree out;
    std::vector<std::int32_t> map(static_cast<std::size_t>(tree.num_vertices()), -1);
    std::vector<std::int32_t> dep(static_cast<std::size_t>(tree.num_vertices()), 0);
    map[0] = 0;
    for (std::int32_t v = 1; v < tree.num_vertices(); ++v) {
        auto p = tree.parent(v);
        dep[static_cast<std::size_t>(v)] = dep[static_cast<std::size_t>(p)] + 1;
        if (dep[static_cast<std::size_t>(v)] > R) continue;
        if (map[static_cast<std::size_t>(p)] == -1) continue;
        map[static_cast<std::size_t>(v)] = out.add_child(map[static_cast<std::size_t>(p)]);
    }
    return out;
}

int profile(const Tree& tree, int R) {
    if (R < 0) throw std::invalid_argument("profile: R must be >= 0");
    if (R == 0) return 1;
    std::vector<std::int32_t> dep(static_cast<std::size_t>(tree.num_vertices()), 0);
    int count = 0;
    for (std::int32_t v = 1; v < tree.num_vertices(); ++v) {
        dep[static_cast<std::size_t>(v)] = dep[static_cast<std::size_t>(tree.parent(v))] + 1;
        if (dep[static_cast<std::size_t>(v)] == R) ++count;
    }
    return count;
}

std::string canonical_code(const Tree& tree) {
    if (tree.child_count(0) != 1)
        throw std::invalid_argument("canonical_code: root must have exactly one child");
    std::string out;
    encode_from(tree, tree.first_child(0), out);
    return out;
}

Tree decode_canonical(const std::string& code) {
    Tree t;
    std::int32_t cur = 0;
    for (char ch : code) {
        if (ch == '(') {
            cur = t.add_child(cur);
        } else if (ch == ')') {
            if (cur == 0) throw std::invalid_argument("decode_canonical: unbalanced code");
            cur = t.parent(cur);
        } else {
            throw std::invalid_argument("decode_canonical: bad character");
        }
    }
    if (cur != 0 || t.child_count(0) != 1)
        throw std::invalid_argument("decode_canonical: malformed code");
    return t;
}

namespace {

// All balanced-parenthesis sequences with m pairs, appended to `out` with the
// given prefix; each sequence describes the forest below the root's child.
void gen_codes(int open, int close, std::string& prefix, std::vector<std::string>& out) {
    if (open == 0 && close == 0) {
        out.push_back(prefix);
        return;
    }
    if (open > 0) {
        prefix.push_back('(');
        gen_codes(open - 1, close + 1, prefix, out);
        prefix.pop_back();
    }
    if (close > 0) {
        prefix.push_back(')');
        gen_codes(open, close - 1, prefix, out);
        prefix.pop_back();
    }
}

} // namespace

std::vector<Tree> enumerate_trees(int N) {
    if (N < 1 || N > 12) throw std::invalid_argument("enumerate_trees: N must be in [1,12]");
    std::vector<std::string> bodies;
    std::string prefix;
    gen_codes(N - 1, 0, prefix, bodies);
    std::vector<Tree> out;
    out.reserve(bodies.size());
    for (const auto& b : bodies) out.push_back(decode_canonical("(" + b + ")"));
    return out;
}

Tree make_chain(int L) {
    Tree t;
    std::int32_t v = 0;
    for (int i = 0; i < L; ++i) v = t.add_child(v);
    return t;
}

void graft_below(Tree& dst, std::int32_t at, const Tree& src, std::int32_t src_vertex) {
    for (std::int32_t c = src.first_child(src_vertex); c != -1; c = src.next_sibling(c)) {
        std::int32_t nc = dst.add_child(at);
        if (src.is_open(c)) dst.mark_open(nc);
        graft_below(dst, nc, src, c);
    }
}

} // namespace gentree
