#pragma once

#include <cstdint>

#include "dcs/error.hpp"

namespace dcs {

/// The automaton alphabet. Serialization characters are 'A', 'B', 'C'.
enum class Cell : std::uint8_t { A = 0, B = 1, C = 2 };

constexpr char to_char(Cell c) { return "ABC"[static_cast<int>(c)]; }

inline Cell cell_from_char(char ch) {
    switch (ch) {
        case 'A': return Cell::A;
        case 'B': return Cell::B;
        case 'C': return Cell::C;
        default: throw Error(std::string("invalid cell character '") + ch + "'");
    }
}

/// Law I: A->A, B->C, C->B. Pointwise it is exactly the transliteration map.
constexpr Cell law_one(Cell c) {
    constexpr Cell map[3] = {Cell::A, Cell::C, Cell::B};
    return map[static_cast<int>(c)];
}

/// Law II: A->C, B->A, C->B. Applied where the mask sees at least one C.
constexpr Cell law_two(Cell c) {
    constexpr Cell map[3] = {Cell::C, Cell::A, Cell::B};
    return map[static_cast<int>(c)];
}

constexpr Cell transliterate(Cell c) { return law_one(c); }

}  // namespace dcs
