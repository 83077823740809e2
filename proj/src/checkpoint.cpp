#include "semnav/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace semnav {

namespace {
constexpr const char* kMagic = "semnav-checkpoint 1";
}

void Checkpoint::add(std::string name, int rows, int cols, std::vector<double> values) {
    if (static_cast<std::size_t>(rows) * cols != values.size()) {
        throw ShapeError("checkpoint: shape/value count mismatch for " + name);
    }
    if (find(name) != nullptr) throw ValueError("checkpoint: duplicate entry " + name);
    entries_.push_back({std::move(name), rows, cols, std::move(values)});
}

const CheckpointEntry* Checkpoint::find(const std::string& name) const {
    for (const auto& e : entries_) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

const CheckpointEntry& Checkpoint::require(const std::string& name) const {
    const CheckpointEntry* e = find(name);
    if (e == nullptr) throw LoadError("checkpoint: missing entry " + name);
    return *e;
}

std::string Checkpoint::to_text() const {
    std::ostringstream os;
    os << kMagic << "\n";
    char buf[40];
    for (const auto& e : entries_) {
        os << "tensor " << e.name << " " << e.rows << " " << e.cols << "\n";
        for (int r = 0; r < e.rows; ++r) {
            for (int c = 0; c < e.cols; ++c) {
                std::snprintf(buf, sizeof(buf), "%.17g", e.values[static_cast<std::size_t>(r) * e.cols + c]);
                os << (c == 0 ? "" : " ") << buf;
            }
            os << "\n";
        }
    }
    return os.str();
}

Checkpoint Checkpoint::from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kMagic) {
        throw LoadError("checkpoint: bad magic line");
    }
    Checkpoint ck;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream hdr(line);
        std::string kw, name;
        int rows = 0, cols = 0;
        hdr >> kw >> name >> rows >> cols;
        if (kw != "tensor" || name.empty() || rows <= 0 || cols <= 0 || !hdr) {
            throw LoadError("checkpoint: malformed header: " + line);
        }
        std::vector<double> vals;
        vals.reserve(static_cast<std::size_t>(rows) * cols);
        for (int r = 0; r < rows; ++r) {
            if (!std::getline(is, line)) throw LoadError("checkpoint: truncated record " + name);
            std::istringstream row(line);
            for (int c = 0; c < cols; ++c) {
                double v;
                if (!(row >> v)) throw LoadError("checkpoint: short row in " + name);
                vals.push_back(v);
            }
        }
        ck.add(std::move(name), rows, cols, std::move(vals));
    }
    return ck;
}

void Checkpoint::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("checkpoint: cannot open for write: " + path);
    out << to_text();
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("checkpoint: cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

}  // namespace semnav
