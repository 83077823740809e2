#include "semnav/store.hpp"

#include "semnav/errors.hpp"

namespace semnav {

SharedParameterStore::SharedParameterStore(
    const std::vector<std::pair<std::string, Tensor>>& source, bool strict, double rms_decay,
    double rms_epsilon)
    : strict_(strict) {
    if (source.empty()) throw ValueError("parameter store: empty parameter list");
    for (const auto& [name, t] : source) {
        auto slot = std::make_unique<Slot>();
        slot->name = name;
        slot->rows = t.rows();
        slot->cols = t.cols();
        slot->value = t.values();
        slot->opt.decay = rms_decay;
        slot->opt.epsilon = rms_epsilon;
        params_.push_back(std::move(slot));
    }
}

void SharedParameterStore::snapshot(const std::vector<Tensor>& dst) const {
    if (dst.size() != params_.size()) throw ShapeError("store snapshot: parameter count mismatch");
    std::unique_lock<std::mutex> global(global_lock_, std::defer_lock);
    if (strict_) global.lock();
    for (size_t k = 0; k < params_.size(); ++k) {
        const Slot& s = *params_[k];
        if (dst[k].rows() != s.rows || dst[k].cols() != s.cols)
            throw ShapeError("store snapshot: shape mismatch at '" + s.name + "'");
        std::unique_lock<std::mutex> local(s.lock, std::defer_lock);
        if (!strict_) local.lock();
        Tensor d = dst[k];  // handle copy; payload is shared
        std::copy(s.value.begin(), s.value.end(), d.values().begin());
    }
}

void SharedParameterStore::apply_update(const std::vector<const std::vector<double>*>& grads,
                                        double learning_rate) {
    if (grads.size() != params_.size()) throw ShapeError("store update: parameter count mismatch");
    std::unique_lock<std::mutex> global(global_lock_, std::defer_lock);
    if (strict_) global.lock();
    for (size_t k = 0; k < params_.size(); ++k) {
        Slot& s = *params_[k];
        if (grads[k]->size() != s.value.size())
            throw ShapeError("store update: gradient size mismatch at '" + s.name + "'");
        std::unique_lock<std::mutex> local(s.lock, std::defer_lock);
        if (!strict_) local.lock();
        s.opt.learning_rate = learning_rate;
        rmsprop_step(s.value, *grads[k], s.opt);
    }
    version_.fetch_add(1, std::memory_order_relaxed);
}

long long SharedParameterStore::add_frames(long long n) {
    return frame_counter_.fetch_add(n, std::memory_order_relaxed) + n;
}

std::uint64_t SharedParameterStore::shape_checksum() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    for (const auto& s : params_) {
        mix(static_cast<std::uint64_t>(s->rows));
        mix(static_cast<std::uint64_t>(s->cols));
    }
    return h;
}

void SharedParameterStore::export_opt(Checkpoint& ckpt) const {
    std::unique_lock<std::mutex> global(global_lock_, std::defer_lock);
    if (strict_) global.lock();
    for (const auto& sp : params_) {
        const Slot& s = *sp;
        std::unique_lock<std::mutex> local(s.lock, std::defer_lock);
        if (!strict_) local.lock();
        if (!s.opt.accumulator.empty())
            ckpt.add("opt/" + s.name, s.rows, s.cols, s.opt.accumulator);
    }
}

void SharedParameterStore::import_opt(const Checkpoint& ckpt) {
    std::unique_lock<std::mutex> global(global_lock_, std::defer_lock);
    if (strict_) global.lock();
    for (auto& sp : params_) {
        Slot& s = *sp;
        std::unique_lock<std::mutex> local(s.lock, std::defer_lock);
        if (!strict_) local.lock();
        const CheckpointEntry* opt = ckpt.find("opt/" + s.name);
        if (opt) {
            if (opt->rows != s.rows || opt->cols != s.cols)
                throw LoadError("store import: accumulator shape mismatch at '" + s.name + "'");
            s.opt.accumulator = opt->values;
        } else {
            s.opt.accumulator.clear();
        }
    }
}

}  // namespace semnav
