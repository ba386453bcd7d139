#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "dcs/grid.hpp"
#include "dcs/mask.hpp"
#include "dcs/prng.hpp"
#include "dcs/seeding.hpp"
#include "oracles.hpp"

using namespace dcs;

TEST_CASE("cell characters are bijective") {
    for (Cell c : {Cell::A, Cell::B, Cell::C}) CHECK(cell_from_char(to_char(c)) == c);
    CHECK_THROWS_AS(cell_from_char('X'), Error);
    CHECK_THROWS_AS(cell_from_char('a'), Error);
}

TEST_CASE("laws are bijections and law one is the transliteration") {
    std::set<Cell> img1, img2;
    for (Cell c : {Cell::A, Cell::B, Cell::C}) {
        img1.insert(law_one(c));
        img2.insert(law_two(c));
        CHECK(transliterate(c) == law_one(c));
    }
    CHECK(img1.size() == 3);
    CHECK(img2.size() == 3);
    CHECK(law_two(Cell::A) == Cell::C);
    CHECK(law_two(Cell::B) == Cell::A);
    CHECK(law_two(Cell::C) == Cell::B);
}

TEST_CASE("mask parsing: von Neumann") {
    const Mask m = Mask::parse("DIM 2\nRANK 1\n010\n101\n010\n");
    CHECK(m.dim() == 2);
    CHECK(m.rank() == 1);
    CHECK(m.includes_center() == false);
    CHECK(m.size() == 4);
    CHECK(m.contains(std::vector<int>{0, 1}));
    CHECK(m.contains(std::vector<int>{-1, 0}));
    CHECK(!m.contains(std::vector<int>{1, 1}));
}

TEST_CASE("mask parsing: full 3x3 keeps the center") {
    const Mask m = Mask::parse("DIM 2\nRANK 1\n111\n111\n111\n");
    CHECK(m.size() == 9);
    CHECK(m.rank() == 1);
    CHECK(m.includes_center());
}

TEST_CASE("mask parsing: 3d 18-cell block") {
    const Mask m = Mask::parse(
        "DIM 3\nRANK 1\n"
        "010\n111\n010\n\n"
        "111\n101\n111\n\n"
        "010\n111\n010\n");
    CHECK(m.dim() == 3);
    CHECK(m.size() == 18);
    CHECK(m.rank() == 1);
    CHECK(!m.includes_center());
    CHECK(m.to_text() ==
          "DIM 3\nRANK 1\n010\n111\n010\n\n111\n101\n111\n\n010\n111\n010\n");
}

TEST_CASE("mask parse errors name the position") {
    CHECK_THROWS_WITH_AS(Mask::parse("DIM 2\nRANK 1\n010\n1x1\n010\n"),
                         doctest::Contains("line 4"), Error);
    CHECK_THROWS_WITH_AS(Mask::parse("DIM 2\nRANK 1\n010\n10\n010\n"), doctest::Contains("cubic"), Error);
    CHECK_THROWS_WITH_AS(Mask::parse("DIM 2\nRANK 1\n000\n000\n000\n"), doctest::Contains("empty"), Error);
    CHECK_THROWS_WITH_AS(Mask::parse("DIM 2\nRANK 1\n010\n111\n000\n"),
                         doctest::Contains("not symmetric"), Error);
    CHECK_THROWS_WITH_AS(Mask::parse("DIM 2\nRANK 2\n00000\n00100\n01010\n00100\n00000\n"),
                         doctest::Contains("RANK"), Error);
    CHECK_THROWS_AS(Mask::parse("RANK 1\n010\n101\n010\n"), Error);
    CHECK_THROWS_AS(Mask::parse("DIM 2\nRANK 1\n010\n101\n"), Error);
}

TEST_CASE("mask round trip through text") {
    for (int rank : {1, 2, 3}) {
        const Mask m = oracles::box_mask(2, rank);
        CHECK(Mask::parse(m.to_text()).offsets() == m.offsets());
    }
    const Mask m3 = oracles::box_mask(3, 1, true);
    CHECK(Mask::parse(m3.to_text()).offsets() == m3.offsets());
}

TEST_CASE("symmetry validation") {
    CHECK(!validate_mask_symmetry(Mask::parse("DIM 2\nRANK 1\n010\n101\n010\n")));

    const Mask lop(2, {{1, 0}});
    const auto v = validate_mask_symmetry(lop);
    REQUIRE(v.has_value());
    CHECK(v->offset == std::vector<int>{1, 0});
    CHECK(!lop.contains(v->image));
    CHECK(!v->element.empty());

    // the 48 cube symmetries, enumerated independently of the validator
    const auto group = hypercube_symmetries(3);
    CHECK(group.size() == 48);
    const Mask cube18 = Mask::parse(
        "DIM 3\nRANK 1\n010\n111\n010\n\n111\n101\n111\n\n010\n111\n010\n");
    std::set<std::vector<int>> offsets(cube18.offsets().begin(), cube18.offsets().end());
    for (const auto& [perm, signs] : group) {
        std::set<std::vector<int>> image;
        for (const auto& o : offsets) {
            std::vector<int> img(3);
            for (int j = 0; j < 3; ++j) img[static_cast<std::size_t>(j)] = signs[static_cast<std::size_t>(j)] * o[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
            image.insert(img);
        }
        CHECK(image == offsets);
    }
    CHECK(!validate_mask_symmetry(cube18));
}

TEST_CASE("parity balance") {
    const auto vn = mask_parity_balance(Mask::parse("DIM 2\nRANK 1\n010\n101\n010\n"));
    CHECK(vn == ParityBalance{0, 4});
    CHECK(vn.one_sided());

    const auto box = mask_parity_balance(oracles::box_mask(2, 1));
    CHECK(box == ParityBalance{4, 4});
    CHECK(!box.one_sided());

    // 3x3x3 minus corners minus center: the 12 edge neighbors have even
    // coordinate sum, the 6 face neighbors odd
    const auto cube = mask_parity_balance(oracles::box_mask(3, 1));
    CHECK(cube.even + cube.odd == 26);
    const Mask cube18 = Mask::parse(
        "DIM 3\nRANK 1\n010\n111\n010\n\n111\n101\n111\n\n010\n111\n010\n");
    const auto p18 = mask_parity_balance(cube18);
    CHECK(p18 == ParityBalance{12, 6});
    CHECK(!p18.one_sided());
}

TEST_CASE("grid basics and boundary semantics") {
    Grid g({3, 4}, parse_boundary_flags("PO", 2));
    CHECK(g.size() == 12);
    CHECK(count_states(g) == StateCounts{12, 0, 0});
    g.set(std::vector<int>{1, 2}, Cell::C);
    CHECK(g.at(std::vector<int>{1, 2}) == Cell::C);
    // periodic axis 0 wraps
    CHECK(g.at(std::vector<int>{-2, 2}) == Cell::C);
    CHECK(g.at(std::vector<int>{4, 2}) == Cell::C);
    // open axis 1 reads A out of range
    CHECK(g.at(std::vector<int>{1, 4}) == Cell::A);
    CHECK(g.at(std::vector<int>{1, -1}) == Cell::A);
    CHECK(g.at(std::vector<int>{1, 100}) == Cell::A);
}

TEST_CASE("grid text round trip and parse errors") {
    SplitMix64 rng(7);
    Grid g = oracles::random_grid({4, 5}, parse_boundary_flags("PO", 2), rng);
    CHECK(Grid::parse(g.to_text()) == g);

    Grid g3 = oracles::random_grid({2, 3, 4}, parse_boundary_flags("PPO", 3), rng);
    CHECK(Grid::parse(g3.to_text()) == g3);

    Grid g1 = oracles::random_grid({6}, parse_boundary_flags("P", 1), rng);
    CHECK(Grid::parse(g1.to_text()) == g1);

    CHECK_THROWS_AS(Grid::parse(""), Error);
    CHECK_THROWS_AS(Grid::parse("XXX 2 3x3 PP\nAAA\nAAA\nAAA\n"), Error);
    CHECK_THROWS_WITH_AS(Grid::parse("DCS1 2 3x3 PP\nAAA\nAAA\n"), doctest::Contains("rows"), Error);
    CHECK_THROWS_AS(Grid::parse("DCS1 2 3x3 PP\nAAA\nAXA\nAAA\n"), Error);
    CHECK_THROWS_AS(Grid::parse("DCS1 2 3x3 PQ\nAAA\nAAA\nAAA\n"), Error);
    CHECK_THROWS_AS(Grid::parse("DCS1 3 3x3 PP\nAAA\nAAA\nAAA\n"), Error);
}

TEST_CASE("transliteration fixes A and swaps B with C") {
    Grid g({5, 5});
    CHECK(transliterate(g) == g);

    g.set(std::vector<int>{3, 4}, Cell::B);
    Grid t = transliterate(g);
    CHECK(t.at(std::vector<int>{3, 4}) == Cell::C);
    CHECK(count_states(t) == StateCounts{24, 0, 1});

    SplitMix64 rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        const Grid r = oracles::random_grid({6, 7}, parse_boundary_flags("PP", 2), rng);
        CHECK(transliterate(transliterate(r)) == r);
        const auto before = count_states(r);
        const auto after = count_states(transliterate(r));
        CHECK(after.a == before.a);
        CHECK(after.b == before.c);
        CHECK(after.c == before.b);
    }
}

TEST_CASE("random_initial counts, determinism and errors") {
    const Grid g = random_initial({70, 70}, 8, 42);
    CHECK(count_states(g) == StateCounts{4892, 8, 0});

    CHECK(random_initial({5, 5}, 0, 99) == Grid({5, 5}));
    CHECK(random_initial({70, 70}, 8, 42) == g);
    CHECK(random_initial({70, 70}, 8, 43) != g);

    const Grid full = random_initial({3, 3}, 9, 1);
    CHECK(count_states(full) == StateCounts{0, 9, 0});

    CHECK_THROWS_WITH_AS(random_initial({3, 3}, 10, 1), doctest::Contains("exceeds"), Error);
    CHECK_THROWS_AS(random_initial({3, 3}, -1, 1), Error);
}

TEST_CASE("count_states sums to the cell count") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Grid g = oracles::random_grid({4, 4, 4}, parse_boundary_flags("PPP", 3), rng);
        const auto c = count_states(g);
        CHECK(c.a + c.b + c.c == g.size());
    }
}
