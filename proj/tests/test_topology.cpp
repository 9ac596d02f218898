#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qram/topology.hpp"

using namespace qram;

TEST_CASE("path follows address bits, bit 0 routing at layer 0") {
    TreeSpec spec{2, 1, Scheme::Qutrit, 1};
    auto p00 = path_of(0b00, spec);
    REQUIRE(p00.size() == 2);
    CHECK(p00[0] == NodeId{0, 0});
    CHECK(p00[1] == NodeId{1, 0});

    auto p10 = path_of(0b10, spec);
    CHECK(p10[0] == NodeId{0, 0});
    CHECK(p10[1] == NodeId{1, 1});
}

TEST_CASE("path of address 1001 in a 4-layer tree") {
    TreeSpec spec{4, 3, Scheme::Qutrit, 1};
    auto path = path_of(0b1001, spec);
    REQUIRE(path.size() == 4);
    CHECK(path[0] == NodeId{0, 0});
    CHECK(path[1] == NodeId{1, 1});
    CHECK(path[2] == NodeId{2, 2});
    CHECK(path[3] == NodeId{3, 4});
}

TEST_CASE("path rejects wrong address width") {
    TreeSpec spec{2, 1, Scheme::Qutrit, 1};
    CHECK_THROWS_AS(path_of(4, spec), std::invalid_argument);
}

TEST_CASE("layer enumeration") {
    TreeSpec spec{4, 1, Scheme::Qutrit, 1};
    CHECK(enumerate_layer(0, spec).size() == 1);
    auto l1 = enumerate_layer(1, spec);
    REQUIRE(l1.size() == 2);
    CHECK(l1[0] == NodeId{1, 0});
    CHECK(l1[1] == NodeId{1, 1});
    CHECK(enumerate_layer(3, spec).size() == 8);
    CHECK_THROWS_AS(enumerate_layer(4, spec), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_layer(-1, spec), std::invalid_argument);
}

TEST_CASE("parent/child relation holds for every non-root node") {
    TreeSpec spec{6, 1, Scheme::Qutrit, 1};
    for (int l = 0; l < spec.n; ++l)
        for (const NodeId& x : enumerate_layer(l, spec)) {
            if (l + 1 < spec.n) {
                CHECK(x.left().parent() == x);
                CHECK(x.right().parent() == x);
            }
        }
}

TEST_CASE("shared path prefix matches shared address prefix, n <= 6") {
    for (int n = 1; n <= 6; ++n) {
        TreeSpec spec{n, 1, Scheme::Qutrit, 1};
        for (uint64_t a = 0; a < (uint64_t{1} << n); ++a) {
            auto pa = path_of(a, spec);
            for (uint64_t b = 0; b < (uint64_t{1} << n); ++b) {
                auto pb = path_of(b, spec);
                for (int l = 0; l < n; ++l) {
                    bool agree = true;
                    for (int i = 0; i < l; ++i)
                        if (address_bit(a, n, i) != address_bit(b, n, i)) agree = false;
                    CHECK((pa[l] == pb[l]) == agree);
                }
            }
        }
    }
}

TEST_CASE("layout indexing: bus first, tree nodes in (layer,pos) order") {
    TreeSpec spec{3, 2, Scheme::Qutrit, 2};
    QuditLayout layout(spec, 1);
    CHECK(layout.address_bus(0) == 0);
    CHECK(layout.data_bus(0) == 3);
    CHECK(layout.high_wire(0) == 5);
    CHECK(layout.tree_begin == 6);
    CHECK(layout.total == 6 + 7 * 3);
    CHECK(layout.node_address({0, 0}) == 6);
    CHECK(layout.node_data({0, 0}, 1) == 8);
    CHECK(layout.node_address({1, 1}) == 6 + 2 * 3);
    CHECK(layout.dim(layout.node_address({1, 0})) == 3);
    CHECK(layout.dim(layout.node_data({1, 0}, 0)) == 2);
    CHECK(layout.dim(layout.data_bus(1)) == 2);

    QuditLayout qb(TreeSpec{3, 2, Scheme::Qubit, 1}, 0);
    CHECK(qb.dim(qb.node_address({2, 3})) == 2);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(TreeSpec({0, 1, Scheme::Qutrit, 1}).check(), std::invalid_argument);
    CHECK_THROWS_AS(TreeSpec({1, 0, Scheme::Qutrit, 1}).check(), std::invalid_argument);
    CHECK_THROWS_AS(TreeSpec({2, 2, Scheme::Qutrit, 3}).check(), std::invalid_argument);
    CHECK_NOTHROW(TreeSpec({2, 2, Scheme::Qutrit, 2}).check());
}
