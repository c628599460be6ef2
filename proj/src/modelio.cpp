#include "air/modelio.hpp"

namespace air::modelio {

const char* role_name(ModelRole role) {
    switch (role) {
        case ModelRole::embed: return "embed";
        case ModelRole::base: return "base";
        case ModelRole::reflection: return "reflection";
        case ModelRole::judge: return "judge";
    }
    return "base";
}

ModelRole role_from_name(const std::string& name) {
    if (name == "embed") return ModelRole::embed;
    if (name == "base") return ModelRole::base;
    if (name == "reflection") return ModelRole::reflection;
    if (name == "judge") return ModelRole::judge;
    throw std::invalid_argument("unknown model role: " + name);
}

const char* phase_name(Phase phase) {
    return phase == Phase::train ? "train" : "inference";
}

const UsageRow& UsageReport::at(Phase phase, ModelRole role) const {
    for (const auto& row : rows) {
        if (row.phase == phase && row.role == role) return row;
    }
    throw std::logic_error("usage report missing a phase/role row");
}

long long UsageReport::total_input() const {
    long long sum = 0;
    for (const auto& row : rows) sum += row.input_tokens;
    return sum;
}

long long UsageReport::total_output() const {
    long long sum = 0;
    for (const auto& row : rows) sum += row.output_tokens;
    return sum;
}

void UsageLedger::record(Phase phase, const Usage& usage) {
    if (usage.input_tokens < 0 || usage.output_tokens < 0)
        throw std::invalid_argument("usage counts must be non-negative");
    std::lock_guard lock(mutex_);
    input_[static_cast<int>(phase)][static_cast<int>(usage.role)] += usage.input_tokens;
    output_[static_cast<int>(phase)][static_cast<int>(usage.role)] += usage.output_tokens;
}

UsageReport UsageLedger::report() const {
    std::lock_guard lock(mutex_);
    UsageReport rep;
    for (Phase phase : kAllPhases) {
        for (ModelRole role : kAllRoles) {
            rep.rows.push_back({phase, role, input_[static_cast<int>(phase)][static_cast<int>(role)],
                                output_[static_cast<int>(phase)][static_cast<int>(role)]});
        }
    }
    return rep;
}

}  // namespace air::modelio
