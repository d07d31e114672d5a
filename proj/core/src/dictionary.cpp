#include "autotag/dictionary.hpp"

#include "autotag/errors.hpp"
#include "autotag/random.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace autotag {

using nlohmann::json;

const BitMatrix& MarkerDictionary::bits(int id) const
{
    if (id < 0 || id >= size()) {
        throw UnknownId("marker id " + std::to_string(id) + " not in dictionary of " +
                        std::to_string(size()));
    }
    return codewords[id];
}

namespace {

BitMatrix draw_candidate(int n, Rng& rng)
{
    BitMatrix m(n);
    std::uint64_t word = 0;
    int left = 0;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (left == 0) {
                word = rng();
                left = 64;
            }
            m.set(r, c, (word & 1u) != 0);
            word >>= 1;
            --left;
        }
    }
    return m;
}

} // namespace

MarkerDictionary generate_dictionary(int cells, int count, int tau, std::uint64_t seed,
                                     std::int64_t max_candidates)
{
    if (cells < 3) {
        throw std::invalid_argument("cells must be >= 3");
    }
    if (count < 1) {
        throw std::invalid_argument("count must be >= 1");
    }
    if (tau < 1 || tau > cells * cells) {
        throw std::invalid_argument("tau must lie in [1, cells^2]");
    }

    MarkerDictionary dict;
    dict.cells = cells;
    dict.tau = tau;
    dict.seed = seed;

    // Every accepted codeword with its three non-trivial rotations.
    std::vector<BitMatrix> rotations;
    Rng rng(seed);
    for (std::int64_t attempt = 0; attempt < max_candidates; ++attempt) {
        BitMatrix cand = draw_candidate(cells, rng);
        if (self_rotation_distance(cand) < tau) {
            continue;
        }
        bool ok = true;
        for (const BitMatrix& r : rotations) {
            if (hamming(cand, r) < tau) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            continue;
        }
        for (int k = 0; k < 4; ++k) {
            rotations.push_back(rotate_bits(cand, k));
        }
        dict.codewords.push_back(std::move(cand));
        if (dict.size() == count) {
            return dict;
        }
    }
    throw GenerationExhausted("placed " + std::to_string(dict.size()) + " of " +
                              std::to_string(count) + " codewords (cells=" +
                              std::to_string(cells) + ", tau=" + std::to_string(tau) + ") in " +
                              std::to_string(max_candidates) + " candidates");
}

int correction_capacity(const MarkerDictionary& dict) { return (dict.tau - 1) / 2; }

std::optional<std::string> find_dictionary_violation(const MarkerDictionary& dict)
{
    for (int i = 0; i < dict.size(); ++i) {
        if (dict.codewords[i].size() != dict.cells) {
            return "codeword " + std::to_string(i) + " has the wrong side";
        }
        const int self = self_rotation_distance(dict.codewords[i]);
        if (self < dict.tau) {
            return "codeword " + std::to_string(i) + " is within " + std::to_string(self) +
                   " of its own rotation";
        }
        for (int j = i + 1; j < dict.size(); ++j) {
            const int d = rotational_distance(dict.codewords[i], dict.codewords[j]);
            if (d < dict.tau) {
                return "codewords " + std::to_string(i) + " and " + std::to_string(j) +
                       " are at rotational distance " + std::to_string(d);
            }
        }
    }
    return std::nullopt;
}

GrayImage render_marker(const MarkerDictionary& dict, int id, int pixels_per_cell,
                        int quiet_zone_cells)
{
    const BitMatrix& bits = dict.bits(id);
    if (pixels_per_cell < 1) {
        throw std::invalid_argument("pixels_per_cell must be >= 1");
    }
    if (quiet_zone_cells < 0) {
        throw std::invalid_argument("quiet_zone_cells must be >= 0");
    }
    const int n = dict.cells;
    const int total = n + 2 + 2 * quiet_zone_cells;
    const int side = total * pixels_per_cell;
    GrayImage img(side, side, 255);
    for (int cy = 0; cy < n + 2; ++cy) {
        for (int cx = 0; cx < n + 2; ++cx) {
            const bool border = cy == 0 || cx == 0 || cy == n + 1 || cx == n + 1;
            const bool black = border || bits(cy - 1, cx - 1);
            if (!black) {
                continue;
            }
            const int x0 = (cx + quiet_zone_cells) * pixels_per_cell;
            const int y0 = (cy + quiet_zone_cells) * pixels_per_cell;
            for (int y = y0; y < y0 + pixels_per_cell; ++y) {
                for (int x = x0; x < x0 + pixels_per_cell; ++x) {
                    img.at(x, y) = 0;
                }
            }
        }
    }
    return img;
}

std::string dictionary_to_json(const MarkerDictionary& dict)
{
    json markers = json::array();
    for (int id = 0; id < dict.size(); ++id) {
        markers.push_back({{"id", id}, {"bits", dict.codewords[id].to_rows()}});
    }
    const json doc = {
        {"cells", dict.cells}, {"tau", dict.tau}, {"seed", dict.seed}, {"markers", markers}};
    return doc.dump(2) + "\n";
}

MarkerDictionary dictionary_from_json(const std::string& text)
{
    MarkerDictionary dict;
    try {
        const json doc = json::parse(text);
        dict.cells = doc.at("cells").get<int>();
        dict.tau = doc.at("tau").get<int>();
        dict.seed = doc.value("seed", std::uint64_t{0});
        const json& markers = doc.at("markers");
        std::vector<std::optional<BitMatrix>> slots(markers.size());
        for (const json& m : markers) {
            const int id = m.at("id").get<int>();
            if (id < 0 || id >= static_cast<int>(slots.size()) || slots[id]) {
                throw Error("marker ids must be 0..count-1 without duplicates");
            }
            BitMatrix bits = BitMatrix::from_rows(m.at("bits").get<std::vector<std::string>>());
            if (bits.size() != dict.cells) {
                throw Error("marker " + std::to_string(id) + " does not have " +
                            std::to_string(dict.cells) + " rows");
            }
            slots[id] = std::move(bits);
        }
        for (auto& s : slots) {
            dict.codewords.push_back(std::move(*s));
        }
    } catch (const json::exception& e) {
        throw Error(std::string("dictionary JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw Error(std::string("dictionary JSON: ") + e.what());
    }
    if (auto violation = find_dictionary_violation(dict)) {
        throw Error("dictionary violates tau=" + std::to_string(dict.tau) + ": " + *violation);
    }
    return dict;
}

void save_dictionary(const MarkerDictionary& dict, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError(path.string() + ": cannot open for writing");
    }
    out << dictionary_to_json(dict);
}

MarkerDictionary load_dictionary(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path.string() + ": cannot open");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return dictionary_from_json(ss.str());
}

} // namespace autotag
