#include "irg/tree.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace irg {

RootedWeightedTree RootedWeightedTree::root_only(double type, double vertex_weight, std::int64_t source) {
    RootedWeightedTree t;
    TreeNode root;
    root.type = type;
    root.vertex_weight = vertex_weight;
    root.source = source;
    t.nodes.push_back(root);
    return t;
}

int RootedWeightedTree::add_child(int parent, double type, double vertex_weight, double edge_weight,
                                  std::int64_t source) {
    if (parent < 0 || static_cast<std::size_t>(parent) >= nodes.size()) throw std::out_of_range("add_child: bad parent");
    TreeNode c;
    c.parent = parent;
    c.depth = nodes[static_cast<std::size_t>(parent)].depth + 1;
    c.type = type;
    c.vertex_weight = vertex_weight;
    c.edge_weight = edge_weight;
    c.source = source;
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(std::move(c));
    nodes[static_cast<std::size_t>(parent)].children.push_back(id);
    return id;
}

int RootedWeightedTree::height() const {
    int h = 0;
    for (const auto& n : nodes) h = std::max(h, n.depth);
    return h;
}

std::vector<int> RootedWeightedTree::bfs_order() const {
    std::vector<int> order;
    if (nodes.empty()) return order;
    order.reserve(nodes.size());
    order.push_back(0);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (int c : nodes[static_cast<std::size_t>(order[i])].children) order.push_back(c);
    return order;
}

RootedWeightedTree RootedWeightedTree::truncated(int depth) const {
    RootedWeightedTree out;
    if (nodes.empty()) return out;
    const auto order = bfs_order();
    std::vector<int> remap(nodes.size(), -1);
    for (int old : order) {
        const TreeNode& n = nodes[static_cast<std::size_t>(old)];
        if (n.depth > depth) continue;
        if (n.parent < 0) {
            out = root_only(n.type, n.vertex_weight, n.source);
            remap[static_cast<std::size_t>(old)] = 0;
        } else {
            remap[static_cast<std::size_t>(old)] =
                out.add_child(remap[static_cast<std::size_t>(n.parent)], n.type, n.vertex_weight, n.edge_weight, n.source);
        }
    }
    return out;
}

std::vector<int> RootedWeightedTree::ulam_label(int node) const {
    std::vector<int> label;
    while (nodes.at(static_cast<std::size_t>(node)).parent >= 0) {
        const int p = nodes[static_cast<std::size_t>(node)].parent;
        const auto& ch = nodes[static_cast<std::size_t>(p)].children;
        label.push_back(static_cast<int>(std::find(ch.begin(), ch.end(), node) - ch.begin()) + 1);
        node = p;
    }
    std::reverse(label.begin(), label.end());
    return label;
}

namespace {

void put_u64(std::string& s, std::uint64_t x) {
    for (int i = 7; i >= 0; --i) s.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

void put_double(std::string& s, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    put_u64(s, bits);
}

}  // namespace

CanonicalCode canonical_code(const RootedWeightedTree& t, CodeOptions opts) {
    if (t.nodes.empty()) return {};
    const auto order = t.bfs_order();
    std::vector<std::string> code(t.nodes.size());
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const TreeNode& n = t.nodes[static_cast<std::size_t>(*it)];
        std::vector<std::string> entries;
        entries.reserve(n.children.size());
        for (int c : n.children) {
            std::string e;
            if (opts.edge_weights) put_double(e, t.nodes[static_cast<std::size_t>(c)].edge_weight);
            put_u64(e, code[static_cast<std::size_t>(c)].size());
            e += code[static_cast<std::size_t>(c)];
            entries.push_back(std::move(e));
            std::string().swap(code[static_cast<std::size_t>(c)]);
        }
        std::sort(entries.begin(), entries.end());
        std::string& s = code[static_cast<std::size_t>(*it)];
        if (opts.types) put_double(s, n.type);
        if (opts.vertex_weights) put_double(s, n.vertex_weight);
        put_u64(s, entries.size());
        for (const auto& e : entries) s += e;
    }
    return {std::move(code[0])};
}

std::string CanonicalCode::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 15]);
    }
    return out;
}

}  // namespace irg
