#include "semnav/vocabulary.hpp"

#include <fstream>
#include <sstream>

namespace semnav {

const char* room_name(RoomType r) {
    switch (r) {
        case RoomType::Kitchen: return "kitchen";
        case RoomType::LivingRoom: return "living_room";
        case RoomType::Bedroom: return "bedroom";
        case RoomType::Bathroom: return "bathroom";
    }
    return "?";
}

RoomType room_from_name(const std::string& name) {
    if (name == "kitchen") return RoomType::Kitchen;
    if (name == "living_room") return RoomType::LivingRoom;
    if (name == "bedroom") return RoomType::Bedroom;
    if (name == "bathroom") return RoomType::Bathroom;
    throw ValueError("unknown room type: " + name);
}

Vocabulary::Vocabulary(std::vector<Category> categories) : categories_(std::move(categories)) {
    for (std::size_t i = 0; i < categories_.size(); ++i) {
        const auto& c = categories_[i];
        if (c.name.empty()) throw ValueError("vocabulary: empty category name");
        if (!index_.emplace(c.name, static_cast<int>(i)).second) {
            throw ValueError("vocabulary: duplicate category " + c.name);
        }
    }
}

int Vocabulary::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValueError("vocabulary: unknown category " + name);
    return it->second;
}

std::vector<int> Vocabulary::room_pool(RoomType room) const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i) {
        if (categories_[static_cast<std::size_t>(i)].room == room) out.push_back(i);
    }
    return out;
}

std::vector<int> Vocabulary::known_targets(RoomType room) const {
    std::vector<int> out;
    for (int i : room_pool(room)) {
        if (!categories_[static_cast<std::size_t>(i)].novel) out.push_back(i);
    }
    return out;
}

std::vector<int> Vocabulary::novel_targets(RoomType room) const {
    std::vector<int> out;
    for (int i : room_pool(room)) {
        if (categories_[static_cast<std::size_t>(i)].novel) out.push_back(i);
    }
    return out;
}

Vocabulary Vocabulary::parse(const std::string& text, const std::string& origin) {
    std::istringstream is(text);
    std::string line;
    std::vector<Category> cats;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        Category c;
        std::string room, flag;
        if (!std::getline(ls, c.name, '\t') || !std::getline(ls, c.group, '\t') ||
            !std::getline(ls, room, '\t') || !std::getline(ls, flag)) {
            throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 4 tab-separated fields");
        }
        c.room = room_from_name(room);
        if (flag == "novel") {
            c.novel = true;
        } else if (flag == "known") {
            c.novel = false;
        } else {
            throw ParseError(origin + ":" + std::to_string(lineno) + ": split flag must be known or novel");
        }
        cats.push_back(std::move(c));
    }
    return Vocabulary(std::move(cats));
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("vocabulary: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

std::string Vocabulary::to_text() const {
    std::ostringstream os;
    os << "# name\tgroup\troom\tsplit\n";
    for (const auto& c : categories_) {
        os << c.name << "\t" << c.group << "\t" << room_name(c.room) << "\t"
           << (c.novel ? "novel" : "known") << "\n";
    }
    return os.str();
}

}  // namespace semnav
