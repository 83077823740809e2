#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semnav/vocabulary.hpp"

namespace semnav {

struct Cell {
    int x = 0;
    int y = 0;
    bool operator==(const Cell&) const = default;
};

struct ObjectInstance {
    int category = 0;
    Cell cell;
};

// One generated room: a wall/free grid, placed object instances and a room
// tag. Immutable once built; environments and workers share scenes read-only.
struct Scene {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> walls;  // row-major, 1 = wall
    std::vector<ObjectInstance> objects;
    RoomType room_type = RoomType::Kitchen;
    std::string scene_id;

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool wall(int x, int y) const { return walls[static_cast<std::size_t>(y) * width + x] != 0; }
    bool free_cell(int x, int y) const { return in_bounds(x, y) && !wall(x, y); }

    // free cells that carry no object; agents spawn here
    std::vector<Cell> spawn_cells() const;
    std::vector<Cell> instances_of(int category) const;
    bool has_category(int category) const;

    // Structured text: grid rows of '.'/'#', then "object <name> <x> <y>"
    // lines, then metadata lines. save(load(f)) is byte-identical to f.
    std::string to_text(const Vocabulary& vocab) const;
    static Scene from_text(const std::string& text, const Vocabulary& vocab,
                           const std::string& origin = "<string>");
    void save(const std::string& path, const Vocabulary& vocab) const;
    static Scene load(const std::string& path, const Vocabulary& vocab);
};

// TSV rows (category_a, category_b, strength in [0,1]); symmetric lookup.
class CooccurrencePrior {
public:
    void set(const std::string& a, const std::string& b, double strength);
    double strength(const std::string& a, const std::string& b) const;
    const std::vector<std::tuple<std::string, std::string, double>>& pairs() const { return pairs_; }

    static CooccurrencePrior load(const std::string& path);
    static CooccurrencePrior parse(const std::string& text, const std::string& origin = "<string>");
    std::string to_text() const;

private:
    std::vector<std::tuple<std::string, std::string, double>> pairs_;
};

}  // namespace semnav
