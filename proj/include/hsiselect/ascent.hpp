#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "csv.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "random.hpp"

namespace hsi {

struct ThresholdGrid {
    std::vector<double> redundancy_axis; // strictly increasing, values in [0,1]
    std::vector<double> relevance_axis;  // strictly increasing

    void validate() const {
        auto check = [](const std::vector<double>& axis, const char* name) {
            if (axis.empty()) throw domain_error(std::string(name) + " axis is empty");
            for (std::size_t i = 1; i < axis.size(); ++i)
                if (!(axis[i] > axis[i - 1]))
                    throw domain_error(std::string(name) + " axis must be strictly increasing");
        };
        check(redundancy_axis, "redundancy");
        check(relevance_axis, "relevance");
        for (double v : redundancy_axis)
            if (!(v >= 0.0 && v <= 1.0))
                throw domain_error("redundancy axis values must lie in [0,1]");
    }

    std::size_t size() const { return redundancy_axis.size() * relevance_axis.size(); }
};

struct GridPoint {
    int ri = 0; // redundancy axis index
    int mi = 0; // relevance axis index

    bool operator==(const GridPoint&) const = default;
    bool operator<(const GridPoint& o) const { return ri != o.ri ? ri < o.ri : mi < o.mi; }
};

inline SelectionThresholds thresholds_at(const ThresholdGrid& grid, GridPoint p) {
    return {grid.relevance_axis[std::size_t(p.mi)], grid.redundancy_axis[std::size_t(p.ri)]};
}

enum class Operator { J_NOT, J_BEST, J_LOST, J_GREAT, INT };

// array index doubles as the tie-break priority order
enum class Direction { LEFT = 0, DOWN = 1, TOP = 2, RIGHT = 3 };

inline const char* operator_name(Operator op) {
    switch (op) {
        case Operator::J_NOT: return "J-not";
        case Operator::J_BEST: return "J-best";
        case Operator::J_LOST: return "J-lost";
        case Operator::J_GREAT: return "J-great";
        default: return "Int";
    }
}

inline const char* direction_name(Direction d) {
    switch (d) {
        case Direction::LEFT: return "left";
        case Direction::DOWN: return "down";
        case Direction::TOP: return "top";
        default: return "right";
    }
}

// left/right step the redundancy index down/up; top/down step the relevance
// index down/up; anything off the axes is reported as no target
inline std::optional<GridPoint> neighbor(const ThresholdGrid& grid, GridPoint p, Direction d) {
    GridPoint q = p;
    switch (d) {
        case Direction::LEFT: --q.ri; break;
        case Direction::RIGHT: ++q.ri; break;
        case Direction::TOP: --q.mi; break;
        case Direction::DOWN: ++q.mi; break;
    }
    if (q.ri < 0 || q.ri >= int(grid.redundancy_axis.size()) || q.mi < 0 ||
        q.mi >= int(grid.relevance_axis.size()))
        return std::nullopt;
    return q;
}

struct DirectionAssessment {
    Direction direction = Direction::LEFT;
    std::optional<GridPoint> target; // empty = off-grid
    Operator op = Operator::J_NOT;
    double ratio = std::numeric_limits<double>::quiet_NaN(); // set iff op is J-best/J-lost/J-great

    bool has_ratio() const { return !std::isnan(ratio); }
};

enum class StepReason { moved, all_j_not, target_already_visited };

inline const char* reason_name(StepReason r) {
    switch (r) {
        case StepReason::moved: return "moved";
        case StepReason::all_j_not: return "all-J-not";
        default: return "target-already-visited";
    }
}

struct TrajectoryStep {
    GridPoint point;
    SelectionThresholds thresholds;
    EvaluationRecord record;
    std::array<DirectionAssessment, 4> assessments; // indexed left, down, top, right
    std::optional<Direction> chosen;                // empty = terminate
    StepReason reason = StepReason::moved;
};

struct SearchResult {
    std::vector<TrajectoryStep> trajectory;
    GridPoint start_point;
    GridPoint final_point;
    EvaluationRecord final_record;
    std::uint64_t restart_seed = 0; // master seed of the multistart that ran this
    int restart_index = 0;
    bool start_undefined = false; // degenerate: the drawn start had no bands
};

// Move classification by the sign pattern of (accuracy delta, band delta):
// losing accuracy while paying bands is forbidden; gaining accuracy while
// shedding (or holding) bands is the best case; gaining both is good; the
// rest shed bands at some accuracy cost, scored by |da|/|db|.
inline std::pair<Operator, double> classify_direction(const EvaluationRecord& from,
                                                      const EvaluationRecord* to) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (!from.defined) throw domain_error("classify_direction: current point is undefined");
    if (!to || !to->defined) return {Operator::J_NOT, nan};
    const double da = to->accuracy - from.accuracy;
    const int db = to->n_bands - from.n_bands;
    if (da < 0.0 && db > 0) return {Operator::J_NOT, nan};
    if (da > 0.0 && db <= 0) return {Operator::J_BEST, db == 0 ? inf : std::abs(da) / std::abs(db)};
    if (da > 0.0 && db > 0) return {Operator::J_GREAT, da / db};
    if (da <= 0.0 && db < 0) return {Operator::J_LOST, std::abs(da) / std::abs(db)};
    if (da == 0.0 && db > 0) return {Operator::J_LOST, 0.0};
    if (da < 0.0 && db == 0) return {Operator::J_LOST, inf};
    return {Operator::J_NOT, nan}; // da == 0 && db == 0: nothing to gain
}

// Retreat interdiction is applied in place so trajectory logs show it; then
// J-best beats J-great beats J-lost, with best/great resolved to the highest
// ratio and lost to the lowest, ties falling to left > down > top > right.
inline std::pair<std::optional<Direction>, Operator>
choose_move(std::array<DirectionAssessment, 4>& assessments,
            const std::optional<GridPoint>& predecessor) {
    for (auto& a : assessments)
        if (predecessor && a.target && *a.target == *predecessor) {
            a.op = Operator::INT;
            a.ratio = std::numeric_limits<double>::quiet_NaN();
        }
    auto pick = [&](Operator op, bool highest) -> std::optional<Direction> {
        std::optional<Direction> best;
        double best_r = 0.0;
        for (const auto& a : assessments) {
            if (a.op != op) continue;
            if (!best || (highest ? a.ratio > best_r : a.ratio < best_r)) {
                best = a.direction;
                best_r = a.ratio;
            }
        }
        return best;
    };
    if (auto d = pick(Operator::J_BEST, true)) return {d, Operator::J_BEST};
    if (auto d = pick(Operator::J_GREAT, true)) return {d, Operator::J_GREAT};
    if (auto d = pick(Operator::J_LOST, false)) return {d, Operator::J_LOST};
    return {std::nullopt, Operator::J_NOT};
}

// Memoizing facade so neighbors assessed several times along a trajectory
// (and across restarts) cost one underlying evaluation each.
class GridEvaluator {
  public:
    GridEvaluator(const ThresholdGrid& grid,
                  std::function<EvaluationRecord(SelectionThresholds)> fn)
        : grid_(grid), fn_(std::move(fn)) {
        grid_.validate();
    }

    const EvaluationRecord& at(GridPoint p) {
        auto it = memo_.find(p);
        if (it == memo_.end()) {
            ++distinct_;
            it = memo_.emplace(p, fn_(thresholds_at(grid_, p))).first;
        }
        return it->second;
    }

    const ThresholdGrid& grid() const { return grid_; }
    long distinct_evaluations() const { return distinct_; }

  private:
    const ThresholdGrid& grid_;
    std::function<EvaluationRecord(SelectionThresholds)> fn_;
    std::map<GridPoint, EvaluationRecord> memo_;
    long distinct_ = 0;
};

inline SearchResult steepest_ascent(GridEvaluator& ev, GridPoint start) {
    const ThresholdGrid& grid = ev.grid();
    SearchResult result;
    result.start_point = start;
    result.final_point = start;
    result.final_record = ev.at(start);
    if (!result.final_record.defined) {
        result.start_undefined = true;
        return result;
    }

    std::set<GridPoint> visited;
    std::optional<GridPoint> predecessor;
    GridPoint current = start;
    for (;;) {
        visited.insert(current);
        const EvaluationRecord& here = ev.at(current);

        TrajectoryStep step;
        step.point = current;
        step.thresholds = thresholds_at(grid, current);
        step.record = here;
        for (int d = 0; d < 4; ++d) {
            DirectionAssessment a;
            a.direction = Direction(d);
            a.target = neighbor(grid, current, a.direction);
            const EvaluationRecord* to = a.target ? &ev.at(*a.target) : nullptr;
            auto [op, ratio] = classify_direction(here, to);
            a.op = op;
            a.ratio = ratio;
            step.assessments[std::size_t(d)] = a;
        }

        auto [chosen, op] = choose_move(step.assessments, predecessor);
        if (!chosen) {
            step.chosen = std::nullopt;
            step.reason = StepReason::all_j_not;
            result.trajectory.push_back(step);
            break;
        }
        GridPoint target = *step.assessments[std::size_t(*chosen)].target;
        if (visited.count(target)) {
            step.chosen = std::nullopt;
            step.reason = StepReason::target_already_visited;
            result.trajectory.push_back(step);
            break;
        }
        step.chosen = *chosen;
        step.reason = StepReason::moved;
        result.trajectory.push_back(step);
        predecessor = current;
        current = target;
    }
    result.final_point = current;
    result.final_record = ev.at(current);
    return result;
}

// Post-hoc check, deliberately independent of the search loop: with no
// retreat interdiction applied, either no move exists or the move that would
// be chosen targets a point already visited.
inline bool is_local_maximum(GridEvaluator& ev, GridPoint point,
                             const std::set<GridPoint>& visited) {
    const EvaluationRecord& here = ev.at(point);
    if (!here.defined) throw domain_error("is_local_maximum: point is undefined");
    std::array<DirectionAssessment, 4> assessments;
    for (int d = 0; d < 4; ++d) {
        DirectionAssessment a;
        a.direction = Direction(d);
        a.target = neighbor(ev.grid(), point, a.direction);
        const EvaluationRecord* to = a.target ? &ev.at(*a.target) : nullptr;
        auto [op, ratio] = classify_direction(here, to);
        a.op = op;
        a.ratio = ratio;
        assessments[std::size_t(d)] = a;
    }
    auto [chosen, op] = choose_move(assessments, std::nullopt);
    if (!chosen) return true;
    return visited.count(*assessments[std::size_t(*chosen)].target) > 0;
}

inline std::set<GridPoint> visited_points(const SearchResult& r) {
    std::set<GridPoint> v;
    for (const auto& s : r.trajectory) v.insert(s.point);
    return v;
}

struct MultistartResult {
    SearchResult best;
    std::vector<SearchResult> all;
};

// Start points come from a seeded shuffle of the whole grid, consumed
// lazily and skipping undefined points — a uniform without-replacement draw
// over the defined points. Once the shuffle is exhausted every point has
// been evaluated, so later draws sample the (now fully known) defined pool
// with replacement.
inline MultistartResult multistart(GridEvaluator& ev, int n_restarts, std::uint64_t seed) {
    if (n_restarts < 1) throw domain_error("multistart: need at least 1 restart");
    const ThresholdGrid& grid = ev.grid();

    std::vector<GridPoint> shuffled;
    shuffled.reserve(grid.size());
    for (int ri = 0; ri < int(grid.redundancy_axis.size()); ++ri)
        for (int mi = 0; mi < int(grid.relevance_axis.size()); ++mi)
            shuffled.push_back({ri, mi});
    std::mt19937_64 rng(seed);
    shuffle_vec(shuffled, rng);

    std::vector<GridPoint> defined_pool;
    std::size_t next = 0;
    auto draw_start = [&]() -> GridPoint {
        while (next < shuffled.size()) {
            GridPoint p = shuffled[next++];
            if (ev.at(p).defined) {
                defined_pool.push_back(p);
                return p;
            }
        }
        if (defined_pool.empty()) throw domain_error("multistart: grid has no defined point");
        return defined_pool[bounded_rand(rng, defined_pool.size())];
    };

    MultistartResult out;
    for (int r = 0; r < n_restarts; ++r) {
        SearchResult res = steepest_ascent(ev, draw_start());
        res.restart_seed = seed;
        res.restart_index = r;
        out.all.push_back(std::move(res));
    }
    auto better = [](const SearchResult& a, const SearchResult& b) {
        if (a.final_record.accuracy != b.final_record.accuracy)
            return a.final_record.accuracy > b.final_record.accuracy;
        if (a.final_record.n_bands != b.final_record.n_bands)
            return a.final_record.n_bands < b.final_record.n_bands;
        return a.restart_index < b.restart_index;
    };
    out.best = out.all[0];
    for (const auto& r : out.all)
        if (better(r, out.best)) out.best = r;
    return out;
}

inline std::string format_ratio(const DirectionAssessment& a) {
    if (!a.has_ratio()) return "";
    if (std::isinf(a.ratio)) return "inf";
    return format_double(a.ratio);
}

inline void write_trajectory_csv(const SearchResult& r, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw io_error("cannot write file: " + path);
    f << "step,th_redundancy,th_relevance,n_bands,accuracy,left_op,left_R,down_op,down_R,"
         "top_op,top_R,right_op,right_R,chosen,reason\n";
    for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
        const auto& s = r.trajectory[i];
        f << i << ',' << format_double(s.thresholds.th_redundancy) << ','
          << format_double(s.thresholds.th_relevance) << ',' << s.record.n_bands << ','
          << format_double(s.record.accuracy);
        for (const auto& a : s.assessments)
            f << ',' << operator_name(a.op) << ',' << format_ratio(a);
        f << ',' << (s.chosen ? direction_name(*s.chosen) : "terminate") << ','
          << reason_name(s.reason) << "\n";
    }
    if (!f) throw io_error("write failed: " + path);
}

inline std::string format_point(const ThresholdGrid& grid, GridPoint p) {
    auto t = thresholds_at(grid, p);
    return format_double(t.th_redundancy) + ";" + format_double(t.th_relevance);
}

inline void write_search_summary_csv(const std::vector<SearchResult>& all,
                                     const ThresholdGrid& grid, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw io_error("cannot write file: " + path);
    f << "restart,seed,start_point,final_point,final_n_bands,final_accuracy,steps\n";
    for (const auto& r : all)
        f << r.restart_index << ',' << r.restart_seed << ',' << format_point(grid, r.start_point)
          << ',' << format_point(grid, r.final_point) << ',' << r.final_record.n_bands << ','
          << format_double(r.final_record.accuracy) << ',' << r.trajectory.size() << "\n";
    if (!f) throw io_error("write failed: " + path);
}

} // namespace hsi
