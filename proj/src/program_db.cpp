#include "codevo/program_db.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace codevo {

ProgramDb::ProgramDb(ArchiveConfig cfg, std::uint64_t rng_seed)
    : cfg_(std::move(cfg)), rng_(rng_seed) {
    if (cfg_.num_islands < 1) throw Error("ConfigError", "num_islands must be >= 1");
    if (cfg_.migration_period < 1) throw Error("ConfigError", "migration_period must be >= 1");
    if (cfg_.parent_policy < 0.0 || cfg_.parent_policy > 1.0)
        throw Error("ConfigError", "parent_policy must be in [0,1]");
    for (const auto& [name, buckets] : cfg_.feature_dims) {
        if (buckets < 1) throw Error("ConfigError", "descriptor bucket count must be >= 1");
        if (name != "length_log2" && name != "objective_quantile")
            throw Error("ConfigError", "unknown feature descriptor: " + name);
    }
    islands_.resize(static_cast<std::size_t>(cfg_.num_islands));
}

std::vector<int> ProgramDb::descriptor_coords(const Candidate& cand) {
    std::vector<int> coords;
    coords.reserve(cfg_.feature_dims.size());
    for (const auto& [name, buckets] : cfg_.feature_dims) {
        int b = 0;
        if (name == "length_log2") {
            std::size_t len = 0;
            for (const auto& t : cand.block_texts) len += t.size();
            b = static_cast<int>(std::floor(std::log2(static_cast<double>(len) + 1.0)));
        } else {  // objective_quantile: rank among all successful objectives seen
            auto lo = std::lower_bound(objective_history_.begin(), objective_history_.end(),
                                       cand.objective);
            std::size_t rank = static_cast<std::size_t>(lo - objective_history_.begin());
            std::size_t total = objective_history_.size() + 1;  // including this one
            b = static_cast<int>(rank * static_cast<std::size_t>(buckets) / total);
        }
        coords.push_back(std::clamp(b, 0, buckets - 1));
    }
    return coords;
}

std::int64_t ProgramDb::island_best_id(const Island& isl) const {
    std::int64_t best = -1;
    double best_obj = 0.0;
    auto consider = [&](std::int64_t id) {
        const Candidate& c = candidates_.at(id);
        if (best < 0 || c.objective > best_obj || (c.objective == best_obj && id < best)) {
            best = id;
            best_obj = c.objective;
        }
    };
    for (const auto& [coords, id] : isl.cells) consider(id);
    for (const auto& [metric, id] : isl.metric_pins) consider(id);
    return best;
}

void ProgramDb::place(Candidate cand) {
    Island& isl = islands_[static_cast<std::size_t>(cand.island)];
    std::int64_t id = cand.id;
    auto cell = isl.cells.find(cand.feature_coords);
    if (cell == isl.cells.end()) {
        isl.cells[cand.feature_coords] = id;
    } else if (cand.objective > candidates_.at(cell->second).objective) {
        cell->second = id;
    }
    for (const auto& [metric, value] : cand.metrics) {
        auto pin = isl.metric_pins.find(metric);
        if (pin == isl.metric_pins.end()) {
            isl.metric_pins[metric] = id;
        } else {
            const Candidate& inc = candidates_.at(pin->second);
            auto inc_it = inc.metrics.find(metric);
            if (inc_it == inc.metrics.end() || value > inc_it->second) pin->second = id;
        }
    }
    if (!best_id_ || cand.objective > candidates_.at(*best_id_).objective) best_id_ = id;
    candidates_.emplace(id, std::move(cand));
}

std::int64_t ProgramDb::add(Candidate cand) {
    if (cand.id < 0) cand.id = next_id_++;
    else if (candidates_.count(cand.id))
        throw Error("DuplicateId", "candidate id already registered: " + std::to_string(cand.id));
    else
        next_id_ = std::max(next_id_, cand.id + 1);
    if (cand.island < 0 || cand.island >= cfg_.num_islands)
        throw Error("ConfigError", "island index out of range: " + std::to_string(cand.island));

    ++registered_;
    if (!cand.failure && !std::isfinite(cand.objective)) cand.failure = "BadMetrics";
    if (cand.failure) {
        ++failed_;
        std::int64_t id = cand.id;
        candidates_.emplace(id, std::move(cand));
        return id;
    }

    ++successful_;
    cand.feature_coords = descriptor_coords(cand);
    objective_history_.insert(
        std::lower_bound(objective_history_.begin(), objective_history_.end(), cand.objective),
        cand.objective);
    std::int64_t id = cand.id;
    place(std::move(cand));
    return id;
}

std::vector<std::int64_t> ProgramDb::island_elites(int island) const {
    const Island& isl = islands_.at(static_cast<std::size_t>(island));
    std::vector<std::int64_t> ids;
    for (const auto& [coords, id] : isl.cells) ids.push_back(id);
    for (const auto& [metric, id] : isl.metric_pins) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

Candidate ProgramDb::sample_parent(int island) {
    std::vector<std::int64_t> ids = island_elites(island);
    if (ids.empty()) throw Error("EmptyIsland", "island has no elites: " + std::to_string(island));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng_) < cfg_.parent_policy)
        return candidates_.at(island_best_id(islands_[static_cast<std::size_t>(island)]));
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    return candidates_.at(ids[pick(rng_)]);
}

std::vector<Candidate> ProgramDb::sample_inspirations(int island, int k, std::int64_t exclude) {
    std::vector<Candidate> out;
    if (k <= 0) return out;
    const Island& isl = islands_.at(static_cast<std::size_t>(island));

    std::vector<std::int64_t> cell_ids;
    for (const auto& [coords, id] : isl.cells)
        if (id != exclude) cell_ids.push_back(id);
    std::shuffle(cell_ids.begin(), cell_ids.end(), rng_);

    std::vector<std::int64_t> chosen;
    for (std::int64_t id : cell_ids) {
        if (chosen.size() == static_cast<std::size_t>(k)) break;
        if (std::find(chosen.begin(), chosen.end(), id) == chosen.end()) chosen.push_back(id);
    }
    if (chosen.size() < static_cast<std::size_t>(k)) {
        std::vector<std::int64_t> rest;
        for (std::int64_t id : island_elites(island))
            if (id != exclude && std::find(chosen.begin(), chosen.end(), id) == chosen.end())
                rest.push_back(id);
        std::shuffle(rest.begin(), rest.end(), rng_);
        for (std::int64_t id : rest) {
            if (chosen.size() == static_cast<std::size_t>(k)) break;
            chosen.push_back(id);
        }
    }
    for (std::int64_t id : chosen) out.push_back(candidates_.at(id));
    return out;
}

void ProgramDb::migrate() {
    if (cfg_.num_islands < 2) return;
    // Choose all migrants before inserting any so one island's arrivals do
    // not feed the next island's departures within the same event.
    std::vector<Candidate> copies;
    for (int i = 0; i < cfg_.num_islands; ++i) {
        std::vector<std::int64_t> ids = island_elites(i);
        std::sort(ids.begin(), ids.end(), [&](std::int64_t a, std::int64_t b) {
            const Candidate& ca = candidates_.at(a);
            const Candidate& cb = candidates_.at(b);
            return ca.objective != cb.objective ? ca.objective > cb.objective : a < b;
        });
        std::size_t take = std::min<std::size_t>(ids.size(), static_cast<std::size_t>(cfg_.migration_count));
        for (std::size_t j = 0; j < take; ++j) {
            Candidate copy = candidates_.at(ids[j]);
            copy.parent_id = copy.id;
            copy.id = next_id_++;
            copy.island = (i + 1) % cfg_.num_islands;
            copies.push_back(std::move(copy));
        }
    }
    for (auto& copy : copies) {
        ++migrated_;
        place(std::move(copy));  // descriptors travel with the copy
    }
}

bool ProgramDb::maybe_migrate() {
    if (successful_ == 0 || successful_ % cfg_.migration_period != 0) return false;
    if (successful_ == last_migration_at_) return false;
    last_migration_at_ = successful_;
    migrate();
    return true;
}

std::optional<Candidate> ProgramDb::best() const {
    if (!best_id_) return std::nullopt;
    return candidates_.at(*best_id_);
}

double ProgramDb::best_objective_or(double fallback) const {
    if (!best_id_) return fallback;
    return candidates_.at(*best_id_).objective;
}

const Candidate& ProgramDb::get(std::int64_t id) const {
    auto it = candidates_.find(id);
    if (it == candidates_.end()) throw Error("UnknownId", "no candidate with id " + std::to_string(id));
    return it->second;
}

bool ProgramDb::has(std::int64_t id) const { return candidates_.count(id) > 0; }

namespace {

nlohmann::json candidate_to_json(const Candidate& c) {
    nlohmann::json j;
    j["id"] = c.id;
    j["block_texts"] = c.block_texts;
    j["metrics"] = c.metrics;
    j["objective"] = c.objective;
    if (c.parent_id) j["parent_id"] = *c.parent_id;
    j["island"] = c.island;
    j["feature_coords"] = c.feature_coords;
    j["birth_step"] = c.birth_step;
    j["eval_excerpt"] = c.eval_excerpt;
    if (c.failure) j["failure"] = *c.failure;
    j["construction"] = c.construction;
    return j;
}

Candidate candidate_from_json(const nlohmann::json& j) {
    Candidate c;
    c.id = j.at("id").get<std::int64_t>();
    c.block_texts = j.at("block_texts").get<std::vector<std::string>>();
    c.metrics = j.at("metrics").get<MetricMap>();
    c.objective = j.at("objective").get<double>();
    if (j.contains("parent_id")) c.parent_id = j["parent_id"].get<std::int64_t>();
    c.island = j.at("island").get<int>();
    c.feature_coords = j.at("feature_coords").get<std::vector<int>>();
    c.birth_step = j.at("birth_step").get<std::int64_t>();
    c.eval_excerpt = j.at("eval_excerpt").get<std::string>();
    if (j.contains("failure")) c.failure = j["failure"].get<std::string>();
    c.construction = j.at("construction").get<std::string>();
    return c;
}

}  // namespace

std::string ProgramDb::snapshot() const {
    nlohmann::json j;
    j["version"] = 1;
    j["config"] = {{"num_islands", cfg_.num_islands},
                   {"feature_dims", cfg_.feature_dims},
                   {"migration_period", cfg_.migration_period},
                   {"migration_count", cfg_.migration_count},
                   {"parent_policy", cfg_.parent_policy}};
    std::ostringstream rng_text;
    rng_text << rng_;
    j["rng"] = rng_text.str();
    j["next_id"] = next_id_;
    j["counters"] = {{"registered", registered_},
                     {"successful", successful_},
                     {"failed", failed_},
                     {"migrated", migrated_},
                     {"last_migration_at", last_migration_at_}};
    j["objective_history"] = objective_history_;
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& [id, c] : candidates_) cands.push_back(candidate_to_json(c));
    j["candidates"] = std::move(cands);
    nlohmann::json isl_json = nlohmann::json::array();
    for (const auto& isl : islands_) {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& [coords, id] : isl.cells)
            cells.push_back({{"coords", coords}, {"id", id}});
        isl_json.push_back({{"cells", std::move(cells)}, {"pins", isl.metric_pins}});
    }
    j["islands"] = std::move(isl_json);
    if (best_id_) j["best"] = *best_id_;
    return j.dump();
}

ProgramDb ProgramDb::restore(const std::string& bytes) {
    nlohmann::json j = nlohmann::json::parse(bytes, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error("CorruptSnapshot", "snapshot is not a structured document");
    try {
        if (j.at("version").get<int>() != 1)
            throw Error("CorruptSnapshot", "unsupported snapshot version");
        ArchiveConfig cfg;
        const auto& jc = j.at("config");
        cfg.num_islands = jc.at("num_islands").get<int>();
        cfg.feature_dims = jc.at("feature_dims").get<std::vector<std::pair<std::string, int>>>();
        cfg.migration_period = jc.at("migration_period").get<long>();
        cfg.migration_count = jc.at("migration_count").get<int>();
        cfg.parent_policy = jc.at("parent_policy").get<double>();

        ProgramDb db(cfg);
        std::istringstream rng_text(j.at("rng").get<std::string>());
        rng_text >> db.rng_;
        if (!rng_text) throw Error("CorruptSnapshot", "bad rng state");
        db.next_id_ = j.at("next_id").get<std::int64_t>();
        const auto& k = j.at("counters");
        db.registered_ = k.at("registered").get<long>();
        db.successful_ = k.at("successful").get<long>();
        db.failed_ = k.at("failed").get<long>();
        db.migrated_ = k.at("migrated").get<long>();
        db.last_migration_at_ = k.at("last_migration_at").get<long>();
        db.objective_history_ = j.at("objective_history").get<std::vector<double>>();
        for (const auto& cj : j.at("candidates")) {
            Candidate c = candidate_from_json(cj);
            db.candidates_.emplace(c.id, std::move(c));
        }
        const auto& isl_json = j.at("islands");
        if (isl_json.size() != db.islands_.size())
            throw Error("CorruptSnapshot", "island count does not match config");
        for (std::size_t i = 0; i < db.islands_.size(); ++i) {
            for (const auto& cell : isl_json[i].at("cells"))
                db.islands_[i].cells[cell.at("coords").get<std::vector<int>>()] =
                    cell.at("id").get<std::int64_t>();
            db.islands_[i].metric_pins =
                isl_json[i].at("pins").get<std::map<std::string, std::int64_t>>();
        }
        if (j.contains("best")) db.best_id_ = j["best"].get<std::int64_t>();
        return db;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error("CorruptSnapshot", std::string("snapshot field error: ") + e.what());
    }
}

}  // namespace codevo
