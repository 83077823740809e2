#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "semnav/errors.hpp"

namespace semnav {

enum class RoomType { Kitchen, LivingRoom, Bedroom, Bathroom };

const char* room_name(RoomType r);
RoomType room_from_name(const std::string& name);
inline constexpr int kRoomCount = 4;

struct Category {
    std::string name;
    std::string group;   // semantic group, e.g. "fruit"
    RoomType room;       // room affinity used by the scene generator
    bool novel = false;  // held out of training targets
};

// Ordered category list with dense indices. Indices are stable for the life
// of an experiment; every |V|-sized vector in the stack is laid out in this
// order.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<Category> categories);

    int size() const { return static_cast<int>(categories_.size()); }
    const Category& category(int idx) const { return categories_.at(static_cast<std::size_t>(idx)); }
    const std::vector<Category>& categories() const { return categories_; }

    bool contains(const std::string& name) const { return index_.count(name) > 0; }
    int index_of(const std::string& name) const;

    std::vector<int> room_pool(RoomType room) const;
    std::vector<int> known_targets(RoomType room) const;
    std::vector<int> novel_targets(RoomType room) const;

    // TSV: name, group, room, known|novel. '#' starts a comment line.
    static Vocabulary load(const std::string& path);
    static Vocabulary parse(const std::string& text, const std::string& origin = "<string>");
    std::string to_text() const;

private:
    std::vector<Category> categories_;
    std::unordered_map<std::string, int> index_;
};

}  // namespace semnav
