#pragma once

#include "autotag/bits.hpp"
#include "autotag/image.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace autotag {

/// Ordered set of payload codewords; the id of a codeword is its index.
///
/// Every pair of codewords is at rotational Hamming distance >= tau, and every
/// codeword is at distance >= tau from its own quarter-turn rotations, so a
/// decoded pattern fixes both identity and orientation.
struct MarkerDictionary
{
    int cells = 0;
    int tau = 0;
    std::uint64_t seed = 0;
    std::vector<BitMatrix> codewords;

    int size() const noexcept { return static_cast<int>(codewords.size()); }
    const BitMatrix& bits(int id) const;

    friend bool operator==(const MarkerDictionary&, const MarkerDictionary&) = default;
};

constexpr std::int64_t kDefaultGenerationBudget = 1'000'000;

/// Rejection sampling over uniformly random payloads with a seeded
/// mt19937_64. Throws GenerationExhausted once `max_candidates` draws have
/// been spent without filling the dictionary.
MarkerDictionary generate_dictionary(int cells, int count, int tau, std::uint64_t seed,
                                     std::int64_t max_candidates = kDefaultGenerationBudget);

/// floor((tau - 1) / 2)
int correction_capacity(const MarkerDictionary& dict);

/// Exhaustive O(count^2) check of the distance invariants. Returns a
/// description of the first violation, or nullopt when valid.
std::optional<std::string> find_dictionary_violation(const MarkerDictionary& dict);

/// White quiet zone, one-cell black border, payload; black = 0, white = 255.
/// Side is (cells + 2 + 2 * quiet_zone_cells) * pixels_per_cell.
GrayImage render_marker(const MarkerDictionary& dict, int id, int pixels_per_cell,
                        int quiet_zone_cells);

// JSON: {"cells": n, "tau": t, "seed": s, "markers": [{"id": k, "bits": [rows]}]}
std::string dictionary_to_json(const MarkerDictionary& dict);
MarkerDictionary dictionary_from_json(const std::string& text);
void save_dictionary(const MarkerDictionary& dict, const std::filesystem::path& path);
MarkerDictionary load_dictionary(const std::filesystem::path& path);

} // namespace autotag
