#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qram {

enum class Scheme { Qutrit, Qubit };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

// Tree node (layer l, position p), 0 <= p < 2^l. Children of (l,p) are
// (l+1, 2p) and (l+1, 2p+1).
struct NodeId {
    int layer = 0;
    int pos = 0;

    NodeId parent() const { return {layer - 1, pos / 2}; }
    NodeId left() const { return {layer + 1, 2 * pos}; }
    NodeId right() const { return {layer + 1, 2 * pos + 1}; }
    bool operator==(const NodeId& o) const { return layer == o.layer && pos == o.pos; }
    bool operator!=(const NodeId& o) const { return !(*this == o); }
};

// Geometry of one instance: n-layer full binary tree over 2^n k-bit cells.
struct TreeSpec {
    int n = 1;
    int k = 1;
    Scheme scheme = Scheme::Qutrit;
    int bandwidth = 1;  // c, data qubits per node

    void check() const;
    int64_t node_count() const { return (int64_t{1} << n) - 1; }
    int64_t cell_count() const { return int64_t{1} << n; }
};

// Bit of `address` consumed at `layer`: 0 routes left, 1 routes right.
// Addresses are plain integers; the bit routed at layer 0 is the most
// significant of the n address bits, so the integer value is the cell index.
inline int address_bit(uint64_t address, int n, int layer) {
    return static_cast<int>((address >> (n - 1 - layer)) & 1u);
}

std::vector<NodeId> path_of(uint64_t address, const TreeSpec& spec);
std::vector<NodeId> enumerate_layer(int layer, const TreeSpec& spec);

// Canonical flat indexing of every qudit in an instance:
//   [0, n)                address bus wires
//   [n, n+k)              data bus wires
//   [n+k, n+k+m)          high-address register wires (hybrid tasks)
//   [tree_begin, total)   tree nodes, (layer, pos) ascending, address qudit
//                         first then data banks 0..c-1
// Qudit 0 is the fastest-varying digit of a dense state index.
struct QuditLayout {
    int n = 0, k = 0, c = 1, m = 0;
    Scheme scheme = Scheme::Qutrit;
    int nodes = 0;
    int tree_begin = 0;
    int total = 0;

    QuditLayout() = default;
    QuditLayout(const TreeSpec& spec, int high_bits);

    int address_bus(int i) const { return i; }
    int data_bus(int i) const { return n + i; }
    int high_wire(int i) const { return n + k + i; }

    int node_flat(NodeId x) const { return (1 << x.layer) - 1 + x.pos; }
    int node_address(NodeId x) const { return tree_begin + node_flat(x) * (1 + c); }
    int node_data(NodeId x, int bank) const { return tree_begin + node_flat(x) * (1 + c) + 1 + bank; }

    int tree_qudit_count() const { return total - tree_begin; }
    bool is_tree(int q) const { return q >= tree_begin; }
    bool is_tree_address(int q) const { return is_tree(q) && (q - tree_begin) % (1 + c) == 0; }

    // 3 for qutrit-scheme tree address qudits, 2 otherwise
    int dim(int q) const {
        return (scheme == Scheme::Qutrit && is_tree_address(q)) ? 3 : 2;
    }
};

}  // namespace qram
