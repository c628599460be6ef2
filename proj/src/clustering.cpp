#include "air/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "air/random.hpp"
#include "air/text.hpp"

namespace air::clustering {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        sum += diff * diff;
    }
    return sum;
}

void validate_vectors(const std::vector<std::vector<double>>& vectors, int k) {
    if (k <= 0) throw std::invalid_argument("kmeans: K must be positive");
    if (static_cast<std::size_t>(k) > vectors.size())
        throw std::invalid_argument("kmeans: K (" + std::to_string(k) + ") exceeds point count (" +
                                    std::to_string(vectors.size()) + ")");
    if (vectors.front().empty())
        throw std::invalid_argument("kmeans: zero-dimensional vectors");
    for (const auto& v : vectors) {
        if (v.size() != vectors.front().size())
            throw std::invalid_argument("kmeans: vectors have mixed dimensionality");
    }
}

// Seeded farthest-point start: a seeded first pick, then repeatedly the point
// with the largest distance to its nearest chosen centroid (ties toward the
// lower index, already-chosen points excluded).
std::vector<std::vector<double>> farthest_point_init(
    const std::vector<std::vector<double>>& vectors, int k, std::uint64_t seed) {
    const std::size_t n = vectors.size();
    rng::Rng r(seed);
    std::vector<bool> chosen(n, false);
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);

    std::size_t first = r.next_below(n);
    chosen[first] = true;
    centroids.push_back(vectors[first]);

    std::vector<double> nearest_sq(n, std::numeric_limits<double>::infinity());
    while (centroids.size() < static_cast<std::size_t>(k)) {
        for (std::size_t i = 0; i < n; ++i) {
            nearest_sq[i] = std::min(nearest_sq[i], squared_distance(vectors[i], centroids.back()));
        }
        std::size_t best = n;
        double best_d = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (chosen[i]) continue;
            if (nearest_sq[i] > best_d) {
                best_d = nearest_sq[i];
                best = i;
            }
        }
        chosen[best] = true;
        centroids.push_back(vectors[best]);
    }
    return centroids;
}

// Assigns every point to its nearest centroid (squared Euclidean, ties toward
// the lower cluster index) and records the SSE of that assignment.
void assign_points(const std::vector<std::vector<double>>& vectors, ClusterState& state) {
    const std::size_t n = vectors.size();
    const int k = state.cluster_count();
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        double best_sq = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            const double sq = squared_distance(vectors[i], state.centroids[c]);
            state.distances[i][c] = std::sqrt(sq);
            if (sq < best_sq) {
                best_sq = sq;
                best = c;
            }
        }
        state.assignment[i] = best;
        sse += best_sq;
    }
    state.sse_history.push_back(sse);
}

// Recomputes centroids as member means; clusters left empty are reseeded to
// the point currently farthest from its assigned centroid (each reseed
// consumes its point for this round).
void update_centroids(const std::vector<std::vector<double>>& vectors, ClusterState& state) {
    const std::size_t n = vectors.size();
    const int k = state.cluster_count();
    const std::size_t dim = vectors.front().size();

    std::vector<int> counts(k, 0);
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const int c = state.assignment[i];
        ++counts[c];
        for (std::size_t d = 0; d < dim; ++d) sums[c][d] += vectors[i][d];
    }

    std::vector<bool> used_for_reseed(n, false);
    for (int c = 0; c < k; ++c) {
        if (counts[c] > 0) {
            for (std::size_t d = 0; d < dim; ++d) state.centroids[c][d] = sums[c][d] / counts[c];
            continue;
        }
        std::size_t best = 0;
        double best_sq = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (used_for_reseed[i]) continue;
            const double sq =
                squared_distance(vectors[i], state.centroids[state.assignment[i]]);
            if (sq > best_sq) {
                best_sq = sq;
                best = i;
            }
        }
        used_for_reseed[best] = true;
        state.centroids[c] = vectors[best];
    }
}

std::vector<std::vector<int>> members_by_cluster(const std::vector<int>& assignment, int k) {
    std::vector<std::vector<int>> members(k);
    for (std::size_t i = 0; i < assignment.size(); ++i)
        members[assignment[i]].push_back(static_cast<int>(i));
    return members;
}

Distribution distribution_from_counts(const std::vector<int>& counts, int total) {
    Distribution dist;
    dist.probabilities.assign(counts.size(), 0.0);
    if (total == 0) {
        dist.empty = true;
        return dist;
    }
    for (std::size_t g = 0; g < counts.size(); ++g)
        dist.probabilities[g] = static_cast<double>(counts[g]) / static_cast<double>(total);
    return dist;
}

}  // namespace

ClusterState kmeans(const std::vector<std::vector<double>>& vectors, int k, std::uint64_t seed,
                    int max_iterations) {
    if (vectors.empty()) throw std::invalid_argument("kmeans: no vectors");
    validate_vectors(vectors, k);
    if (max_iterations < 1) throw std::invalid_argument("kmeans: max_iterations must be >= 1");

    ClusterState state;
    state.centroids = farthest_point_init(vectors, k, seed);
    state.assignment.assign(vectors.size(), 0);
    state.distances.assign(vectors.size(), std::vector<double>(k, 0.0));

    assign_points(vectors, state);
    for (int iter = 1; iter < max_iterations; ++iter) {
        update_centroids(vectors, state);
        const std::vector<int> previous = state.assignment;
        assign_points(vectors, state);
        if (state.assignment == previous) break;
    }
    return state;
}

OutputGroups detect_output_groups(const std::vector<std::string>& outputs,
                                  const std::vector<std::vector<double>>& output_embeddings,
                                  const ClusterConfig& config) {
    if (outputs.empty()) throw std::invalid_argument("detect_output_groups: no outputs");

    // Distinct normalized outputs, ids by first appearance.
    std::unordered_map<std::string, int> label_ids;
    std::vector<int> discrete_groups;
    discrete_groups.reserve(outputs.size());
    for (const auto& out : outputs) {
        const std::string norm = text::normalize(out);
        auto [it, inserted] = label_ids.emplace(norm, static_cast<int>(label_ids.size()));
        discrete_groups.push_back(it->second);
    }

    OutputGroups groups;
    if (static_cast<int>(label_ids.size()) <= config.discrete_output_threshold) {
        groups.mode = GroupingMode::discrete;
        groups.group_of = std::move(discrete_groups);
        groups.group_count = static_cast<int>(label_ids.size());
        return groups;
    }

    if (output_embeddings.size() != outputs.size())
        throw std::invalid_argument(
            "detect_output_groups: output embeddings required for embedded grouping");

    ClusterState out_state =
        kmeans(output_embeddings, config.k, config.seed, config.max_iterations);

    // Compact cluster ids over non-empty clusters so group ids stay dense.
    std::vector<int> remap(config.k, -1);
    int next_id = 0;
    for (int c = 0; c < config.k; ++c) {
        for (int a : out_state.assignment) {
            if (a == c) {
                remap[c] = next_id++;
                break;
            }
        }
    }
    groups.mode = GroupingMode::embedded;
    groups.group_of.reserve(outputs.size());
    for (int a : out_state.assignment) groups.group_of.push_back(remap[a]);
    groups.group_count = next_id;
    return groups;
}

Distribution global_distribution(const OutputGroups& groups) {
    if (groups.group_of.empty())
        throw std::invalid_argument("global_distribution: no examples");
    std::vector<int> counts(groups.group_count, 0);
    for (int g : groups.group_of) ++counts[g];
    return distribution_from_counts(counts, static_cast<int>(groups.group_of.size()));
}

Distribution cluster_distribution(const std::vector<int>& assignment, const OutputGroups& groups,
                                  int cluster) {
    std::vector<int> counts(groups.group_count, 0);
    int total = 0;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] != cluster) continue;
        ++counts[groups.group_of[i]];
        ++total;
    }
    return distribution_from_counts(counts, total);
}

double distribution_mse(const Distribution& local, const Distribution& global) {
    if (local.probabilities.size() != global.probabilities.size())
        throw std::invalid_argument("distribution_mse: length mismatch");
    double sum = 0;
    for (std::size_t g = 0; g < local.probabilities.size(); ++g) {
        const double diff = local.probabilities[g] - global.probabilities[g];
        sum += diff * diff;
    }
    return sum / static_cast<double>(local.probabilities.size());
}

ReassignResult reassign(const ClusterState& state, const OutputGroups& groups,
                        const Distribution& global) {
    ReassignResult result;
    result.state = state;
    const std::size_t n = state.example_count();
    const int k = state.cluster_count();

    // Per-cluster group counts, maintained incrementally as moves happen.
    std::vector<std::vector<int>> counts(k, std::vector<int>(groups.group_count, 0));
    std::vector<int> totals(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++counts[state.assignment[i]][groups.group_of[i]];
        ++totals[state.assignment[i]];
    }

    for (std::size_t i = 0; i < n; ++i) {
        const int current = result.state.assignment[i];
        const int g = groups.group_of[i];

        // Lift the example out of its cluster before testing candidates.
        --counts[current][g];
        --totals[current];

        std::vector<int> order(k);
        for (int c = 0; c < k; ++c) order[c] = c;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (result.state.distances[i][a] != result.state.distances[i][b])
                return result.state.distances[i][a] < result.state.distances[i][b];
            return a < b;
        });

        int chosen = current;  // fallback: keep the original assignment
        double chosen_before = 0, chosen_after = 0;
        bool found = false;
        for (int c : order) {
            const Distribution before = distribution_from_counts(counts[c], totals[c]);
            std::vector<int> with = counts[c];
            ++with[g];
            const Distribution after = distribution_from_counts(with, totals[c] + 1);
            const double mse_before = distribution_mse(before, global);
            const double mse_after = distribution_mse(after, global);
            if (mse_after <= mse_before) {
                chosen = c;
                chosen_before = mse_before;
                chosen_after = mse_after;
                found = true;
                break;
            }
        }

        ++counts[chosen][g];
        ++totals[chosen];
        if (found && chosen != current) {
            result.state.assignment[i] = chosen;
            result.moves.push_back(
                {static_cast<int>(i), current, chosen, chosen_before, chosen_after});
        }
    }
    return result;
}

RepairResult repair_single_class(const ClusterState& state, const OutputGroups& groups) {
    RepairResult result;
    result.state = state;
    const int k = state.cluster_count();
    const auto members = members_by_cluster(state.assignment, k);

    std::vector<bool> dissolved(k, false);
    std::vector<bool> eligible(k, false);
    bool any_dissolved = false;
    bool any_eligible = false;
    for (int c = 0; c < k; ++c) {
        if (members[c].empty()) continue;
        int distinct = 0;
        std::vector<bool> seen(groups.group_count, false);
        for (int i : members[c]) {
            if (!seen[groups.group_of[i]]) {
                seen[groups.group_of[i]] = true;
                ++distinct;
            }
        }
        if (distinct == 1) {
            dissolved[c] = true;
            any_dissolved = true;
        } else {
            eligible[c] = true;
            any_eligible = true;
        }
    }

    if (!any_dissolved) return result;
    if (!any_eligible) {
        result.warning = true;
        return result;
    }

    for (int c = 0; c < k; ++c) {
        if (!dissolved[c]) continue;
        result.dissolved_clusters.push_back(c);
        for (int i : members[c]) {
            int best = -1;
            for (int t = 0; t < k; ++t) {
                if (!eligible[t]) continue;
                if (best < 0 || state.distances[i][t] < state.distances[i][best]) best = t;
            }
            result.state.assignment[i] = best;
            result.moves.push_back({i, c, best});
        }
    }
    return result;
}

ClusterStageResult cluster_stage(const std::vector<std::vector<double>>& input_embeddings,
                                 const std::vector<std::string>& outputs,
                                 const std::vector<std::vector<double>>& output_embeddings,
                                 const ClusterConfig& config) {
    if (input_embeddings.size() != outputs.size())
        throw std::invalid_argument("cluster_stage: inputs and outputs are misaligned");

    ClusterStageResult result;
    ClusterState initial =
        kmeans(input_embeddings, config.k, config.seed, config.max_iterations);
    result.groups = detect_output_groups(outputs, output_embeddings, config);
    result.global = global_distribution(result.groups);

    std::vector<double> mse_before(config.k, 0.0);
    for (int c = 0; c < config.k; ++c) {
        mse_before[c] =
            distribution_mse(cluster_distribution(initial.assignment, result.groups, c),
                             result.global);
    }

    ReassignResult reassigned = reassign(initial, result.groups, result.global);
    RepairResult repaired = repair_single_class(reassigned.state, result.groups);
    result.state = repaired.state;

    auto& report = result.report;
    report.reassign_moves = reassigned.moves;
    report.repair_moves = repaired.moves;
    report.repair_warning = repaired.warning;
    const auto final_members = members_by_cluster(result.state.assignment, config.k);
    for (int c = 0; c < config.k; ++c) {
        ClusterStageReport::PerCluster pc;
        pc.cluster = c;
        pc.members = final_members[c];
        pc.group_histogram.assign(result.groups.group_count, 0);
        for (int i : pc.members) ++pc.group_histogram[result.groups.group_of[i]];
        pc.mse_before_reassign = mse_before[c];
        pc.mse_after_reassign =
            distribution_mse(cluster_distribution(reassigned.state.assignment, result.groups, c),
                             result.global);
        pc.dissolved =
            std::find(repaired.dissolved_clusters.begin(), repaired.dissolved_clusters.end(), c) !=
            repaired.dissolved_clusters.end();
        report.clusters.push_back(std::move(pc));
    }
    return result;
}

}  // namespace air::clustering
