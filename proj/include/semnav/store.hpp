#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "semnav/checkpoint.hpp"
#include "semnav/optim.hpp"
#include "semnav/tensor.hpp"

namespace semnav {

// Canonical parameter values plus shared RMSProp statistics. In the default
// (hogwild) mode each parameter carries its own lock, so a reader sees every
// individual array intact but may observe a set torn across concurrent
// updates. Strict mode serializes whole snapshots and updates behind one
// lock, which makes single-worker runs bit-reproducible and multi-worker
// runs free of torn sets.
class SharedParameterStore {
public:
    SharedParameterStore(const std::vector<std::pair<std::string, Tensor>>& source, bool strict,
                         double rms_decay = 0.99, double rms_epsilon = 1e-8);

    size_t param_count() const { return params_.size(); }
    bool strict() const { return strict_; }

    // Copies canonical values into an identically shaped parameter list.
    void snapshot(const std::vector<Tensor>& dst) const;

    // One RMSProp step from the given gradient arrays (same layout as the
    // construction source). Bumps the version counter.
    void apply_update(const std::vector<const std::vector<double>*>& grads, double learning_rate);

    long long add_frames(long long n);  // returns the post-add total
    long long frames() const { return frame_counter_.load(std::memory_order_relaxed); }
    std::uint64_t version() const { return version_.load(std::memory_order_relaxed); }

    // FNV-1a over all parameter shapes; constant for the lifetime of a run.
    std::uint64_t shape_checksum() const;

    // Optimizer accumulators as "opt/<name>" entries (parameter values travel
    // through the agent's own checkpoint entries).
    void export_opt(Checkpoint& ckpt) const;
    void import_opt(const Checkpoint& ckpt);  // missing entries reset the accumulator

private:
    struct Slot {
        std::string name;
        int rows = 0, cols = 0;
        std::vector<double> value;
        RmsPropState opt;
        mutable std::mutex lock;
    };

    std::vector<std::unique_ptr<Slot>> params_;
    bool strict_;
    mutable std::mutex global_lock_;
    std::atomic<long long> frame_counter_{0};
    std::atomic<std::uint64_t> version_{0};
};

}  // namespace semnav
