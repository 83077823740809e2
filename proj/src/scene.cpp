#include "semnav/scene.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace semnav {

std::vector<Cell> Scene::spawn_cells() const {
    std::vector<std::uint8_t> occupied(static_cast<std::size_t>(width) * height, 0);
    for (const auto& o : objects) {
        occupied[static_cast<std::size_t>(o.cell.y) * width + o.cell.x] = 1;
    }
    std::vector<Cell> out;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (free_cell(x, y) && !occupied[static_cast<std::size_t>(y) * width + x]) {
                out.push_back({x, y});
            }
        }
    }
    return out;
}

std::vector<Cell> Scene::instances_of(int category) const {
    std::vector<Cell> out;
    for (const auto& o : objects) {
        if (o.category == category) out.push_back(o.cell);
    }
    return out;
}

bool Scene::has_category(int category) const {
    return std::any_of(objects.begin(), objects.end(),
                       [category](const ObjectInstance& o) { return o.category == category; });
}

std::string Scene::to_text(const Vocabulary& vocab) const {
    std::ostringstream os;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) os << (wall(x, y) ? '#' : '.');
        os << "\n";
    }
    for (const auto& o : objects) {
        os << "object " << vocab.category(o.category).name << " " << o.cell.x << " " << o.cell.y << "\n";
    }
    os << "room_type " << room_name(room_type) << "\n";
    os << "scene_id " << scene_id << "\n";
    return os.str();
}

Scene Scene::from_text(const std::string& text, const Vocabulary& vocab, const std::string& origin) {
    std::istringstream is(text);
    Scene s;
    std::string line;
    int lineno = 0;
    bool grid_done = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const bool grid_row = line.find_first_not_of(".#") == std::string::npos;
        if (grid_row && !grid_done) {
            if (s.width == 0) {
                s.width = static_cast<int>(line.size());
            } else if (static_cast<int>(line.size()) != s.width) {
                throw ParseError(origin + ":" + std::to_string(lineno) + ": ragged grid row");
            }
            for (char c : line) s.walls.push_back(c == '#' ? 1 : 0);
            ++s.height;
            continue;
        }
        grid_done = true;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "object") {
            std::string name;
            int x = 0, y = 0;
            if (!(ls >> name >> x >> y)) {
                throw ParseError(origin + ":" + std::to_string(lineno) + ": malformed object line");
            }
            ObjectInstance o;
            o.category = vocab.index_of(name);
            o.cell = {x, y};
            if (!s.free_cell(x, y)) {
                throw ValueError(origin + ":" + std::to_string(lineno) + ": object on wall or out of bounds");
            }
            s.objects.push_back(o);
        } else if (kw == "room_type") {
            std::string rt;
            ls >> rt;
            s.room_type = room_from_name(rt);
        } else if (kw == "scene_id") {
            ls >> s.scene_id;
        } else {
            throw ParseError(origin + ":" + std::to_string(lineno) + ": unknown line '" + kw + "'");
        }
    }
    if (s.width == 0 || s.height == 0) throw ParseError(origin + ": no grid rows");
    return s;
}

void Scene::save(const std::string& path, const Vocabulary& vocab) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("scene: cannot open for write: " + path);
    out << to_text(vocab);
}

Scene Scene::load(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("scene: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str(), vocab, path);
}

void CooccurrencePrior::set(const std::string& a, const std::string& b, double strength) {
    if (strength < 0.0 || strength > 1.0) throw ValueError("prior: strength out of [0,1]");
    pairs_.emplace_back(a, b, strength);
}

double CooccurrencePrior::strength(const std::string& a, const std::string& b) const {
    double best = 0.0;
    for (const auto& [pa, pb, s] : pairs_) {
        if ((pa == a && pb == b) || (pa == b && pb == a)) best = std::max(best, s);
    }
    return best;
}

CooccurrencePrior CooccurrencePrior::parse(const std::string& text, const std::string& origin) {
    std::istringstream is(text);
    CooccurrencePrior p;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string a, b, s;
        if (!std::getline(ls, a, '\t') || !std::getline(ls, b, '\t') || !std::getline(ls, s)) {
            throw ParseError(origin + ":" + std::to_string(lineno) + ": expected a<TAB>b<TAB>strength");
        }
        try {
            p.set(a, b, std::stod(s));
        } catch (const ValueError&) {
            throw ValueError(origin + ":" + std::to_string(lineno) + ": strength out of [0,1]");
        } catch (const std::exception&) {
            throw ParseError(origin + ":" + std::to_string(lineno) + ": bad strength '" + s + "'");
        }
    }
    return p;
}

CooccurrencePrior CooccurrencePrior::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("prior: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

std::string CooccurrencePrior::to_text() const {
    std::ostringstream os;
    os << "# category_a\tcategory_b\tstrength\n";
    char buf[32];
    for (const auto& [a, b, s] : pairs_) {
        std::snprintf(buf, sizeof(buf), "%g", s);
        os << a << "\t" << b << "\t" << buf << "\n";
    }
    return os.str();
}

}  // namespace semnav
