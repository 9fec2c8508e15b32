#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "codevo/common.hpp"

namespace codevo {

struct Candidate {
    std::int64_t id = -1;  // assigned by the database when < 0
    std::vector<std::string> block_texts;
    MetricMap metrics;
    double objective = 0.0;
    std::optional<std::int64_t> parent_id;
    int island = 0;
    std::vector<int> feature_coords;  // filled in at registration
    std::int64_t birth_step = 0;
    std::string eval_excerpt;
    // Failed candidates carry the failure tag; they are kept for statistics
    // but never enter the elite grid and are never sampled.
    std::optional<std::string> failure;
    // Optional construction artifact emitted by the evaluation (refine mode).
    std::string construction;
};

struct ArchiveConfig {
    int num_islands = 4;
    // Descriptor name -> bucket count. Shipped descriptors: "length_log2"
    // (total evolved-code bytes, log2-bucketed) and "objective_quantile"
    // (rank among all successful objectives seen so far).
    std::vector<std::pair<std::string, int>> feature_dims = {{"length_log2", 10},
                                                             {"objective_quantile", 10}};
    long migration_period = 50;  // successful registrations between migrations
    int migration_count = 2;     // elites copied per island per migration
    double parent_policy = 0.5;  // probability of exploiting the island best
};

// Evolutionary archive: one MAP-elites grid per island plus per-metric best
// pins, with periodic ring migration. Single-writer; sampling draws from the
// database-owned RNG so snapshots capture the full sampling state.
class ProgramDb {
  public:
    explicit ProgramDb(ArchiveConfig cfg = {}, std::uint64_t rng_seed = 0);

    // Registers an evaluated candidate. Assigns an id when cand.id < 0 and
    // returns it. Successful candidates compete for their island's grid cell
    // and the per-metric pins: a cell elite is replaced only on strictly
    // higher objective (ties keep the incumbent). Non-finite objectives are
    // demoted to failures. Throws DuplicateId.
    std::int64_t add(Candidate cand);

    // Exploit/explore parent choice: with probability parent_policy the
    // island's best elite, otherwise a uniformly random one. Throws
    // EmptyIsland.
    Candidate sample_parent(int island);

    // Up to k distinct elites of the island, excluding `exclude`, drawn from
    // distinct grid cells first and topped up from the remaining sampleable
    // elites. Returns fewer when the island is small.
    std::vector<Candidate> sample_inspirations(int island, int k, std::int64_t exclude);

    // One ring-migration event: each island's top migration_count elites are
    // copied (fresh ids, same descriptors) into the next island, where they
    // compete under the normal registration rule.
    void migrate();

    // Runs migrate() when another migration_period successful registrations
    // have accumulated since the last event. Returns true if it migrated.
    bool maybe_migrate();

    std::optional<Candidate> best() const;
    double best_objective_or(double fallback) const;
    const Candidate& get(std::int64_t id) const;  // throws UnknownId
    bool has(std::int64_t id) const;

    long registered() const { return registered_; }
    long successful() const { return successful_; }
    long failed() const { return failed_; }
    int num_islands() const { return cfg_.num_islands; }
    const ArchiveConfig& config() const { return cfg_; }

    // Ids currently sampleable on an island (grid elites plus pins), sorted.
    std::vector<std::int64_t> island_elites(int island) const;

    // Serialization: restore(snapshot(db)) is observationally equal to db,
    // including counters and RNG state. Throws CorruptSnapshot.
    std::string snapshot() const;
    static ProgramDb restore(const std::string& bytes);

  private:
    struct Island {
        std::map<std::vector<int>, std::int64_t> cells;
        std::map<std::string, std::int64_t> metric_pins;
    };

    std::vector<int> descriptor_coords(const Candidate& cand);
    void place(Candidate cand);  // cell + pin competition, best pointer
    std::int64_t island_best_id(const Island& isl) const;

    ArchiveConfig cfg_;
    std::mt19937_64 rng_;
    std::int64_t next_id_ = 0;
    long registered_ = 0, successful_ = 0, failed_ = 0, migrated_ = 0;
    long last_migration_at_ = 0;
    std::vector<double> objective_history_;  // sorted, successful only
    std::map<std::int64_t, Candidate> candidates_;
    std::vector<Island> islands_;
    std::optional<std::int64_t> best_id_;
};

}  // namespace codevo
