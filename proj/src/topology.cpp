#include "qram/topology.hpp"

namespace qram {

std::string to_string(Scheme scheme) {
    return scheme == Scheme::Qutrit ? "qutrit" : "qubit";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "qutrit") return Scheme::Qutrit;
    if (name == "qubit") return Scheme::Qubit;
    throw std::invalid_argument("unknown scheme: " + name);
}

void TreeSpec::check() const {
    if (n < 1) throw std::invalid_argument("address length n must be >= 1");
    if (k < 1) throw std::invalid_argument("word length k must be >= 1");
    if (k > 62) throw std::invalid_argument("word length k must be <= 62");
    if (bandwidth < 1 || bandwidth > k)
        throw std::invalid_argument("bandwidth c must satisfy 1 <= c <= k");
}

std::vector<NodeId> path_of(uint64_t address, const TreeSpec& spec) {
    spec.check();
    if (address >= (uint64_t{1} << spec.n))
        throw std::invalid_argument("address out of range for n-bit address space");
    std::vector<NodeId> path;
    path.reserve(spec.n);
    NodeId node{0, 0};
    for (int l = 0; l < spec.n; ++l) {
        path.push_back(node);
        node = address_bit(address, spec.n, l) ? node.right() : node.left();
    }
    return path;
}

std::vector<NodeId> enumerate_layer(int layer, const TreeSpec& spec) {
    spec.check();
    if (layer < 0 || layer >= spec.n) throw std::invalid_argument("layer out of range");
    std::vector<NodeId> nodes;
    nodes.reserve(size_t{1} << layer);
    for (int p = 0; p < (1 << layer); ++p) nodes.push_back({layer, p});
    return nodes;
}

QuditLayout::QuditLayout(const TreeSpec& spec, int high_bits)
    : n(spec.n), k(spec.k), c(spec.bandwidth), m(high_bits), scheme(spec.scheme) {
    spec.check();
    if (m < 0) throw std::invalid_argument("high-address width must be >= 0");
    nodes = static_cast<int>(spec.node_count());
    tree_begin = n + k + m;
    total = tree_begin + nodes * (1 + c);
}

}  // namespace qram
