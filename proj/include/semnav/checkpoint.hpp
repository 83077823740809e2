#pragma once

#include <string>
#include <utility>
#include <vector>

#include "semnav/errors.hpp"

namespace semnav {

// Flat text container of named dense matrices. One record per tensor: a
// header line "tensor <name> <rows> <cols>" followed by one line per row of
// decimal values printed at 17 significant digits, which round-trips IEEE
// doubles exactly. Optimizer state travels under "opt/"-prefixed names.
struct CheckpointEntry {
    std::string name;
    int rows = 0;
    int cols = 0;
    std::vector<double> values;
};

class Checkpoint {
public:
    void add(std::string name, int rows, int cols, std::vector<double> values);
    const CheckpointEntry* find(const std::string& name) const;
    const CheckpointEntry& require(const std::string& name) const;
    const std::vector<CheckpointEntry>& entries() const { return entries_; }

    std::string to_text() const;
    static Checkpoint from_text(const std::string& text);

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);

private:
    std::vector<CheckpointEntry> entries_;
};

}  // namespace semnav
