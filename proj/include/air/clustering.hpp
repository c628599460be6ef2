#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace air::clustering {

struct ClusterConfig {
    int k = 5;
    int max_iterations = 100;
    std::uint64_t seed = 0;
    // At most this many distinct normalized outputs counts as a discrete
    // label space; above it, output groups come from embedding clusters.
    int discrete_output_threshold = 20;
};

// Result of KMeans over one embedding matrix. `distances[i][c]` is the
// Euclidean distance from example i to centroid c; assignments break ties
// toward the lower cluster index.
struct ClusterState {
    std::vector<std::vector<double>> centroids;
    std::vector<int> assignment;
    std::vector<std::vector<double>> distances;
    std::vector<double> sse_history;  // one entry per assignment pass

    int cluster_count() const { return static_cast<int>(centroids.size()); }
    std::size_t example_count() const { return assignment.size(); }
};

enum class GroupingMode { discrete, embedded };

struct OutputGroups {
    std::vector<int> group_of;
    int group_count = 1;
    GroupingMode mode = GroupingMode::discrete;
};

struct Distribution {
    std::vector<double> probabilities;
    bool empty = false;  // no members; probabilities all zero
};

// Seeded farthest-point initialization followed by Lloyd iterations until
// assignments stabilize or max_iterations. Clusters emptied by an update are
// reseeded to the point farthest from its assigned centroid.
ClusterState kmeans(const std::vector<std::vector<double>>& vectors, int k, std::uint64_t seed,
                    int max_iterations);

// Discrete grouping (one group per distinct normalized output, ids by first
// appearance) when the output value space is small; otherwise KMeans over
// the output embeddings with the same K, with group ids compacted over
// non-empty clusters.
OutputGroups detect_output_groups(const std::vector<std::string>& outputs,
                                  const std::vector<std::vector<double>>& output_embeddings,
                                  const ClusterConfig& config);

Distribution global_distribution(const OutputGroups& groups);

// Distribution over group ids of the given cluster's current members.
Distribution cluster_distribution(const std::vector<int>& assignment, const OutputGroups& groups,
                                  int cluster);

// Mean over group ids of squared probability differences.
double distribution_mse(const Distribution& local, const Distribution& global);

struct ReassignMove {
    int example = 0;
    int from_cluster = 0;
    int to_cluster = 0;
    double mse_before = 0;  // receiving cluster, before insertion
    double mse_after = 0;   // receiving cluster, after insertion
};

struct ReassignResult {
    ClusterState state;
    std::vector<ReassignMove> moves;
};

// Single pass in ascending example order. Each example is conceptually lifted
// out of its cluster and offered to all clusters in ascending centroid
// distance (ties toward the lower index, the current cluster included); the
// first cluster whose output distribution gets no farther from the global one
// by the insertion receives it. No qualifying cluster leaves the original
// assignment in place. Membership updates apply immediately; centroids and
// distances are not recomputed.
ReassignResult reassign(const ClusterState& state, const OutputGroups& groups,
                        const Distribution& global);

struct RepairMove {
    int example = 0;
    int from_cluster = 0;
    int to_cluster = 0;
};

struct RepairResult {
    ClusterState state;
    std::vector<int> dissolved_clusters;
    std::vector<RepairMove> moves;
    bool warning = false;  // set when no multi-class target exists
};

// Dissolves every non-empty cluster whose members share one output group;
// members move to the nearest remaining cluster that held at least two
// output classes before the repair. With no eligible target the state is
// returned unchanged and the warning flag set.
RepairResult repair_single_class(const ClusterState& state, const OutputGroups& groups);

struct ClusterStageReport {
    struct PerCluster {
        int cluster = 0;
        std::vector<int> members;  // final membership, example indices
        std::vector<int> group_histogram;
        double mse_before_reassign = 0;
        double mse_after_reassign = 0;
        bool dissolved = false;
    };
    std::vector<PerCluster> clusters;
    std::vector<ReassignMove> reassign_moves;
    std::vector<RepairMove> repair_moves;
    bool repair_warning = false;
};

struct ClusterStageResult {
    ClusterState state;  // final membership (after reassign + repair)
    OutputGroups groups;
    Distribution global;
    ClusterStageReport report;
};

// The full stage: KMeans on input embeddings, output-group detection,
// distribution-aware reassignment, single-class repair. Deterministic given
// (embeddings, outputs, config).
ClusterStageResult cluster_stage(const std::vector<std::vector<double>>& input_embeddings,
                                 const std::vector<std::string>& outputs,
                                 const std::vector<std::vector<double>>& output_embeddings,
                                 const ClusterConfig& config);

}  // namespace air::clustering
