#include "semnav/scene_gen.hpp"

#include <algorithm>

#include "semnav/rng.hpp"

namespace semnav {

namespace {

bool free_region_connected(const Scene& s) {
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(s.width) * s.height, 0);
    int start = -1;
    int total_free = 0;
    for (int i = 0; i < s.width * s.height; ++i) {
        if (!s.walls[static_cast<std::size_t>(i)]) {
            ++total_free;
            if (start < 0) start = i;
        }
    }
    if (start < 0) return false;
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = 1;
    int visited = 0;
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        ++visited;
        const int x = cur % s.width, y = cur / s.width;
        const int dx[4] = {1, -1, 0, 0};
        const int dy[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            const int nx = x + dx[d], ny = y + dy[d];
            if (!s.free_cell(nx, ny)) continue;
            const int ni = ny * s.width + nx;
            if (!seen[static_cast<std::size_t>(ni)]) {
                seen[static_cast<std::size_t>(ni)] = 1;
                stack.push_back(ni);
            }
        }
    }
    return visited == total_free;
}

std::vector<Cell> free_cells(const Scene& s) {
    std::vector<Cell> out;
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            if (s.free_cell(x, y)) out.push_back({x, y});
        }
    }
    return out;
}

}  // namespace

Scene generate_scene(RoomType room_type, const SceneGenParams& params, const Vocabulary& vocab,
                     const CooccurrencePrior& prior, std::uint64_t seed, const std::string& scene_id) {
    if (params.min_size < 5) throw ValueError("generate_scene: rooms start at 5x5");
    if (params.max_size < params.min_size) throw ValueError("generate_scene: bad size range");

    const std::vector<int> pool = vocab.room_pool(room_type);
    if (pool.empty()) {
        throw GenerationError(std::string("generate_scene: no categories for room ") + room_name(room_type));
    }
    const int lo_objects = params.min_objects > 0 ? params.min_objects : static_cast<int>(pool.size());
    const int hi_objects = params.max_objects > 0 ? params.max_objects : static_cast<int>(pool.size());
    if (lo_objects < 1 || hi_objects < lo_objects) throw ValueError("generate_scene: bad object count range");

    Rng rng(seed);
    for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
        Scene s;
        s.room_type = room_type;
        s.scene_id = scene_id;
        s.width = rng.uniform_int(params.min_size, params.max_size);
        s.height = rng.uniform_int(params.min_size, params.max_size);
        s.walls.assign(static_cast<std::size_t>(s.width) * s.height, 0);
        for (int x = 0; x < s.width; ++x) {
            s.walls[static_cast<std::size_t>(x)] = 1;
            s.walls[static_cast<std::size_t>(s.height - 1) * s.width + x] = 1;
        }
        for (int y = 0; y < s.height; ++y) {
            s.walls[static_cast<std::size_t>(y) * s.width] = 1;
            s.walls[static_cast<std::size_t>(y) * s.width + s.width - 1] = 1;
        }

        // interior obstacles as short wall segments
        const int interior = (s.width - 2) * (s.height - 2);
        int budget = static_cast<int>(params.obstacle_fraction * interior);
        int guard = 0;
        while (budget > 0 && guard++ < 200) {
            const int len = std::min(budget, rng.uniform_int(1, 3));
            const bool horizontal = rng.bernoulli(0.5);
            const int x0 = rng.uniform_int(1, s.width - 2);
            const int y0 = rng.uniform_int(1, s.height - 2);
            for (int t = 0; t < len; ++t) {
                const int x = horizontal ? x0 + t : x0;
                const int y = horizontal ? y0 : y0 + t;
                if (x <= 0 || x >= s.width - 1 || y <= 0 || y >= s.height - 1) break;
                if (!s.wall(x, y)) {
                    s.walls[static_cast<std::size_t>(y) * s.width + x] = 1;
                    --budget;
                }
            }
        }
        if (!free_region_connected(s)) continue;

        // category sequence: cover the pool once (shuffled), then extras
        const int n_objects = rng.uniform_int(lo_objects, hi_objects);
        std::vector<int> order = pool;
        rng.shuffle(order);
        std::vector<int> cats;
        for (int i = 0; i < n_objects; ++i) {
            if (i < static_cast<int>(order.size())) {
                cats.push_back(order[static_cast<std::size_t>(i)]);
            } else {
                cats.push_back(pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))]);
            }
        }

        std::vector<Cell> open = free_cells(s);
        std::vector<std::uint8_t> taken(static_cast<std::size_t>(s.width) * s.height, 0);
        auto take = [&](Cell c) {
            taken[static_cast<std::size_t>(c.y) * s.width + c.x] = 1;
        };
        auto pick_uniform = [&]() -> Cell {
            std::vector<Cell> cand;
            for (const Cell& c : open) {
                if (!taken[static_cast<std::size_t>(c.y) * s.width + c.x]) cand.push_back(c);
            }
            if (cand.empty()) return {-1, -1};
            return cand[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(cand.size()) - 1))];
        };

        bool ok = true;
        for (std::size_t k = 0; k < cats.size(); ++k) {
            const int cat = cats[k];
            Cell cell{-1, -1};
            if (k > 0) {
                // strongest already-placed partner under the prior
                double best = 0.0;
                Cell partner{-1, -1};
                for (std::size_t p = 0; p < k; ++p) {
                    const double st = prior.strength(vocab.category(cat).name,
                                                     vocab.category(s.objects[p].category).name);
                    if (st > best) {
                        best = st;
                        partner = s.objects[p].cell;
                    }
                }
                if (best > 0.0 && rng.bernoulli(best)) {
                    std::vector<Cell> near;
                    for (const Cell& c : open) {
                        if (taken[static_cast<std::size_t>(c.y) * s.width + c.x]) continue;
                        if (std::abs(c.x - partner.x) <= params.satellite_radius &&
                            std::abs(c.y - partner.y) <= params.satellite_radius) {
                            near.push_back(c);
                        }
                    }
                    if (!near.empty()) {
                        cell = near[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(near.size()) - 1))];
                    }
                }
            }
            if (cell.x < 0) cell = pick_uniform();
            if (cell.x < 0) {
                ok = false;
                break;
            }
            take(cell);
            s.objects.push_back({cat, cell});
        }
        if (!ok) continue;
        if (s.spawn_cells().empty()) continue;
        return s;
    }
    throw GenerationError("generate_scene: constraints unsatisfiable after bounded retries");
}

}  // namespace semnav
