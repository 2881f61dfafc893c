#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "vast/tabulator.hpp"
#include "vast/types.hpp"

namespace vast {

struct Rect {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool contains(double x, double y) const {
        return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
    }
};

/// Axis-aligned wall segment.
struct Wall {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

struct TerminalZone {
    Rect rect;
    double reward = 0.0;
};

struct HazardZone {
    Rect rect;
    double penalty = -1.0;
    double probability = 0.25;
};

struct Teleporter {
    Rect entry;
    double exit_x = 0, exit_y = 0;
    bool enabled = false;
};

enum class ActionScheme {
    Cardinal4,     // fixed-size steps in the four cardinal directions
    TurnForward3,  // move forward, turn left, turn right
};

struct MazeSpec {
    std::string name;
    Rect arena;
    std::vector<Wall> walls;           // perimeter included
    std::vector<Rect> start_regions;
    std::vector<TerminalZone> terminals;
    std::vector<HazardZone> hazards;
    std::vector<Teleporter> teleporters;
    double step_penalty = -0.01;
    double step_size = 0.25;
    std::uint32_t max_episode_len = 200;
    ActionScheme scheme = ActionScheme::Cardinal4;
    std::uint32_t headings = 8;        // TurnForward3 heading resolution
    double obs_noise_sigma = 0.0;      // additive noise on x,y observations

    std::uint32_t action_count() const {
        return scheme == ActionScheme::Cardinal4 ? 4 : 3;
    }
    std::size_t obs_dim() const {
        return scheme == ActionScheme::Cardinal4 ? 2 : 3;
    }
};

struct Pose {
    double x = 0, y = 0;
    std::uint32_t heading = 0;  // index into the discrete heading set
};

struct StepOutcome {
    Observation observation;
    double reward = 0.0;
    bool terminal = false;
};

struct ForcedRunStep {
    ActionId action = 0;
    double reward = 0.0;
    Observation observation;
    bool terminal = false;
};

struct ForcedRunTrace {
    Observation initial;
    Pose start;
    std::vector<ForcedRunStep> steps;
};

namespace detail {

inline double cross(double ax, double ay, double bx, double by) {
    return ax * by - ay * bx;
}

/// Proper or touching segment intersection; touches count as hits, which
/// keeps collision handling conservative.
inline bool segments_intersect(double ax, double ay, double bx, double by, double cx,
                               double cy, double dx, double dy) {
    double d1 = cross(dx - cx, dy - cy, ax - cx, ay - cy);
    double d2 = cross(dx - cx, dy - cy, bx - cx, by - cy);
    double d3 = cross(bx - ax, by - ay, cx - ax, cy - ay);
    double d4 = cross(bx - ax, by - ay, dx - ax, dy - ay);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on = [](double px, double py, double qx, double qy, double rx, double ry) {
        return std::min(px, qx) <= rx && rx <= std::max(px, qx) &&
               std::min(py, qy) <= ry && ry <= std::max(py, qy);
    };
    if (d1 == 0 && on(cx, cy, dx, dy, ax, ay)) return true;
    if (d2 == 0 && on(cx, cy, dx, dy, bx, by)) return true;
    if (d3 == 0 && on(ax, ay, bx, by, cx, cy)) return true;
    if (d4 == 0 && on(ax, ay, bx, by, dx, dy)) return true;
    return false;
}

}  // namespace detail

/// Deterministic-physics continuous 2D maze. Movement is kinematic; a move
/// whose segment would cross a wall leaves the position unchanged (rebound =
/// stay in place). Randomness (start pose, hazard draws, observation noise)
/// comes from the seed handed to reset().
class MazeEnv {
public:
    explicit MazeEnv(MazeSpec spec) : spec_(std::move(spec)) {}

    const MazeSpec& spec() const { return spec_; }
    std::uint32_t action_count() const { return spec_.action_count(); }
    const Pose& pose() const { return pose_; }
    bool terminal() const { return terminal_; }
    std::uint32_t steps_taken() const { return steps_; }
    /// Zone that ended the episode, if any (timeouts leave this empty).
    std::optional<std::size_t> terminal_zone() const { return terminal_zone_; }

    std::pair<Pose, Observation> reset(std::uint64_t seed) {
        rng_.seed(seed);
        const Rect& region = pick_start_region();
        std::uniform_real_distribution<double> ux(region.xmin, region.xmax);
        std::uniform_real_distribution<double> uy(region.ymin, region.ymax);
        pose_ = Pose{ux(rng_), uy(rng_), random_heading()};
        terminal_ = false;
        terminal_zone_.reset();
        steps_ = 0;
        return {pose_, observe()};
    }

    /// Fixed start pose for scripted (forced-run) episodes; hazard and noise
    /// draws still come from the given seed.
    Observation reset_to(const Pose& start, std::uint64_t seed) {
        rng_.seed(seed);
        pose_ = start;
        terminal_ = false;
        terminal_zone_.reset();
        steps_ = 0;
        return observe();
    }

    StepOutcome step(ActionId action) {
        if (terminal_) throw std::logic_error("step() after terminal");
        if (action >= action_count()) throw std::out_of_range("bad action id");

        double nx = pose_.x, ny = pose_.y;
        if (spec_.scheme == ActionScheme::Cardinal4) {
            constexpr double dx[4] = {1, -1, 0, 0};
            constexpr double dy[4] = {0, 0, 1, -1};
            nx += spec_.step_size * dx[action];
            ny += spec_.step_size * dy[action];
        } else {
            if (action == 1) {
                pose_.heading = (pose_.heading + 1) % spec_.headings;
            } else if (action == 2) {
                pose_.heading = (pose_.heading + spec_.headings - 1) % spec_.headings;
            } else {
                double rad = heading_degrees() * M_PI / 180.0;
                nx += spec_.step_size * std::cos(rad);
                ny += spec_.step_size * std::sin(rad);
            }
        }
        if (!blocked(pose_.x, pose_.y, nx, ny)) {
            pose_.x = nx;
            pose_.y = ny;
        }

        StepOutcome out;
        for (const HazardZone& hz : spec_.hazards) {
            if (!hz.rect.contains(pose_.x, pose_.y)) continue;
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            if (unit(rng_) < hz.probability) out.reward += hz.penalty;
        }
        for (std::size_t zi = 0; zi < spec_.terminals.size(); ++zi) {
            const TerminalZone& tz = spec_.terminals[zi];
            if (tz.rect.contains(pose_.x, pose_.y)) {
                out.reward += tz.reward;
                out.terminal = true;
                terminal_zone_ = zi;
                break;
            }
        }
        if (!out.terminal) {
            for (const Teleporter& tp : spec_.teleporters) {
                if (tp.enabled && tp.entry.contains(pose_.x, pose_.y)) {
                    pose_.x = tp.exit_x;
                    pose_.y = tp.exit_y;
                    break;
                }
            }
        }
        out.reward += spec_.step_penalty;
        ++steps_;
        if (steps_ >= spec_.max_episode_len) out.terminal = true;
        terminal_ = out.terminal;
        out.observation = observe();
        return out;
    }

    /// Replace terminal zone rewards; dynamics are untouched.
    void set_rewards(const std::vector<std::pair<std::size_t, double>>& assignment) {
        for (const auto& [zone, reward] : assignment) {
            if (zone >= spec_.terminals.size())
                throw std::out_of_range("unknown terminal zone id");
            spec_.terminals[zone].reward = reward;
        }
    }

    /// The reward-reversal assignment: every terminal reward negated.
    std::vector<std::pair<std::size_t, double>> reversed_assignment() const {
        std::vector<std::pair<std::size_t, double>> out;
        for (std::size_t i = 0; i < spec_.terminals.size(); ++i)
            out.emplace_back(i, -spec_.terminals[i].reward);
        return out;
    }

    /// Drop a wall (e.g. the invisible wall blocking the T-maze right arm
    /// before its forced run).
    void remove_wall(std::size_t index) {
        if (index >= spec_.walls.size()) throw std::out_of_range("unknown wall index");
        spec_.walls.erase(spec_.walls.begin() +
                          static_cast<std::ptrdiff_t>(index));
    }

    void enable_teleporter(std::size_t id) {
        if (id >= spec_.teleporters.size())
            throw std::out_of_range("unknown teleporter id");
        spec_.teleporters[id].enabled = true;
    }

    /// Execute a scripted episode from a fixed pose; stops early on terminal.
    ForcedRunTrace forced_run(const Pose& start, const std::vector<ActionId>& script,
                              std::uint64_t seed) {
        ForcedRunTrace trace;
        trace.start = start;
        trace.initial = reset_to(start, seed);
        for (ActionId a : script) {
            StepOutcome out = step(a);
            trace.steps.push_back(
                ForcedRunStep{a, out.reward, out.observation, out.terminal});
            if (out.terminal) break;
        }
        return trace;
    }

    double heading_degrees() const {
        return 360.0 * static_cast<double>(pose_.heading) /
               static_cast<double>(spec_.headings);
    }

    Observation observe() {
        double x = pose_.x, y = pose_.y;
        if (spec_.obs_noise_sigma > 0.0) {
            std::normal_distribution<double> noise(0.0, spec_.obs_noise_sigma);
            x += noise(rng_);
            y += noise(rng_);
        }
        if (spec_.scheme == ActionScheme::Cardinal4) return {x, y};
        return {x, y, heading_degrees()};
    }

    bool blocked(double x0, double y0, double x1, double y1) const {
        if (!spec_.arena.contains(x1, y1)) return true;
        for (const Wall& w : spec_.walls)
            if (detail::segments_intersect(x0, y0, x1, y1, w.x1, w.y1, w.x2, w.y2))
                return true;
        return false;
    }

private:
    const Rect& pick_start_region() {
        if (spec_.start_regions.empty())
            throw std::logic_error("maze has no start region");
        if (spec_.start_regions.size() == 1) return spec_.start_regions.front();
        std::uniform_int_distribution<std::size_t> pick(0,
                                                        spec_.start_regions.size() - 1);
        return spec_.start_regions[pick(rng_)];
    }

    std::uint32_t random_heading() {
        if (spec_.scheme == ActionScheme::Cardinal4) return 0;
        std::uniform_int_distribution<std::uint32_t> pick(0, spec_.headings - 1);
        return pick(rng_);
    }

    MazeSpec spec_;
    Pose pose_;
    bool terminal_ = true;
    std::optional<std::size_t> terminal_zone_;
    std::uint32_t steps_ = 0;
    std::mt19937_64 rng_;
};

// --- presets ---------------------------------------------------------------
// Desk-scale arenas preserving the papers' task topology: corridor widths of
// one unit, 0.25 steps, 0.5 grid cells.

namespace presets {

inline void add_rect_walls(std::vector<Wall>& walls, const Rect& r) {
    walls.push_back({r.xmin, r.ymin, r.xmax, r.ymin});
    walls.push_back({r.xmin, r.ymax, r.xmax, r.ymax});
    walls.push_back({r.xmin, r.ymin, r.xmin, r.ymax});
    walls.push_back({r.xmax, r.ymin, r.xmax, r.ymax});
}

/// T-maze: two top arms and a stem with the reward at the bottom. With
/// `blocked_right_arm`, an invisible wall closes the right arm at the
/// junction (the shortcut-transfer setup).
inline MazeSpec tmaze(bool blocked_right_arm = false) {
    MazeSpec m;
    m.name = blocked_right_arm ? "tmaze_blocked" : "tmaze";
    m.arena = Rect{0, 5, 0, 3.5};
    // top corridor y:2.5..3.5 with a stem gap at x:2..3
    m.walls = {
        {0, 3.5, 5, 3.5},      // top
        {0, 2.5, 2, 2.5},      // bottom-left of the bar
        {3, 2.5, 5, 2.5},      // bottom-right of the bar
        {0, 2.5, 0, 3.5},      // left cap
        {5, 2.5, 5, 3.5},      // right cap
        {2, 0, 2, 2.5},        // stem left
        {3, 0, 3, 2.5},        // stem right
        {2, 0, 3, 0},          // stem floor
    };
    if (blocked_right_arm) m.walls.push_back({3, 2.5, 3, 3.5});
    m.start_regions = {Rect{0.1, 0.9, 2.6, 3.4}};
    m.terminals = {TerminalZone{Rect{2, 3, 0, 0.6}, 1.0}};
    m.max_episode_len = 300;
    return m;
}

/// Right-arm box of the T-maze (analysis helper for shortcut transfer).
inline Rect tmaze_right_arm() { return Rect{3, 5, 2.5, 3.5}; }

/// Index of the invisible wall added by tmaze(true); remove it before the
/// forced run from the blocked arm.
inline std::size_t tmaze_blocking_wall_index() { return 8; }

/// Scripted run from the end of the blocked right arm into the stem.
inline std::pair<Pose, std::vector<ActionId>> tmaze_forced_run() {
    Pose start{4.70, 2.95, 0};
    std::vector<ActionId> script;
    for (int i = 0; i < 7; ++i) script.push_back(1);  // west to the junction
    for (int i = 0; i < 6; ++i) script.push_back(3);  // south into the stem
    return {start, script};
}

/// Plus-maze: +1 at horizontal arm ends, -1 at vertical arm ends, episode
/// ends at any arm end; rewards reversible via set_rewards.
inline MazeSpec plus_maze() {
    MazeSpec m;
    m.name = "plus";
    m.arena = Rect{0, 5, 0, 5};
    m.walls = {
        {0, 3, 2, 3}, {3, 3, 5, 3},  // horizontal corridor top
        {0, 2, 2, 2}, {3, 2, 5, 2},  // horizontal corridor bottom
        {2, 3, 2, 5}, {3, 3, 3, 5},  // vertical corridor upper
        {2, 0, 2, 2}, {3, 0, 3, 2},  // vertical corridor lower
        {0, 2, 0, 3}, {5, 2, 5, 3},  // horizontal end caps
        {2, 0, 3, 0}, {2, 5, 3, 5},  // vertical end caps
    };
    m.start_regions = {Rect{2.1, 2.9, 2.1, 2.9}};
    m.terminals = {
        TerminalZone{Rect{0, 0.5, 2, 3}, 1.0},   // west arm
        TerminalZone{Rect{4.5, 5, 2, 3}, 1.0},   // east arm
        TerminalZone{Rect{2, 3, 4.5, 5}, -1.0},  // north arm
        TerminalZone{Rect{2, 3, 0, 0.5}, -1.0},  // south arm
    };
    m.max_episode_len = 120;
    return m;
}

/// H-maze: start mid-left; the long route to the reward runs over the top
/// crossbar; the short dead end below the start hosts a teleporter that, once
/// enabled, drops the agent next to the reward.
inline MazeSpec hmaze() {
    MazeSpec m;
    m.name = "hmaze";
    m.arena = Rect{0, 4, 0, 3.5};
    m.walls = {
        {0, 0, 0, 3.5},      // outer left
        {4, 0, 4, 3.5},      // outer right
        {0, 3.5, 4, 3.5},    // outer top
        {0, 0, 1, 0},        // left corridor floor
        {3, 0, 4, 0},        // right corridor floor
        {1, 0, 1, 2.5},      // left corridor inner wall
        {3, 0, 3, 2.5},      // right corridor inner wall
        {1, 2.5, 3, 2.5},    // crossbar floor
    };
    m.start_regions = {Rect{0.1, 0.9, 1.1, 1.9}};
    m.terminals = {TerminalZone{Rect{3, 4, 0, 0.5}, 1.0}};
    m.teleporters = {Teleporter{Rect{0, 1, 0, 0.5}, 3.52, 0.88, false}};
    m.max_episode_len = 900;
    return m;
}

/// Scripted run from the start box down through the (enabled) teleporter and
/// on to the reward zone.
inline std::pair<Pose, std::vector<ActionId>> hmaze_forced_run() {
    Pose start{0.53, 1.48, 0};
    std::vector<ActionId> script(8, 3);  // south through the jump to the reward
    return {start, script};
}

/// Rim-to-center maze: random rim starts, +1 in the center room reached
/// through a north or south door, six 25% hazard zones in the rim.
inline MazeSpec rim_maze() {
    MazeSpec m;
    m.name = "rim";
    m.arena = Rect{0, 5, 0, 5};
    add_rect_walls(m.walls, Rect{0, 5, 0, 5});
    // inner room with full-cell door gaps at x:2..3 on both faces
    m.walls.push_back({1.5, 3.5, 2, 3.5});
    m.walls.push_back({3, 3.5, 3.5, 3.5});
    m.walls.push_back({1.5, 1.5, 2, 1.5});
    m.walls.push_back({3, 1.5, 3.5, 1.5});
    m.walls.push_back({1.5, 1.5, 1.5, 3.5});
    m.walls.push_back({3.5, 1.5, 3.5, 3.5});
    m.terminals = {TerminalZone{Rect{2, 3, 2, 3}, 1.0}};
    m.hazards = {
        HazardZone{Rect{0, 1, 2, 3}, -1.0, 0.25},    // west mid
        HazardZone{Rect{4, 5, 2, 3}, -1.0, 0.25},    // east mid
        HazardZone{Rect{1, 2, 0, 1}, -1.0, 0.25},    // southwest
        HazardZone{Rect{3, 4, 0, 1}, -1.0, 0.25},    // southeast
        HazardZone{Rect{1, 2, 4, 5}, -1.0, 0.25},    // northwest
        HazardZone{Rect{3, 4, 4, 5}, -1.0, 0.25},    // northeast
    };
    m.start_regions = {
        Rect{2.1, 2.9, 0.2, 1.3},   // south rim, clear of hazards
        Rect{2.1, 2.9, 3.7, 4.8},   // north rim
        Rect{0.2, 0.9, 0.2, 1.8},   // southwest pocket
        Rect{4.1, 4.8, 3.2, 4.8},   // northeast pocket
    };
    m.max_episode_len = 250;
    return m;
}

/// Grid geometry matched to the preset arenas: 0.5 cells, 4 bits per axis.
inline GridTabulator default_grid() {
    return GridTabulator({GridDim{0.5, 4}, GridDim{0.5, 4}});
}

inline MazeSpec by_name(const std::string& name) {
    if (name == "tmaze") return tmaze(false);
    if (name == "tmaze_blocked") return tmaze(true);
    if (name == "plus") return plus_maze();
    if (name == "hmaze") return hmaze();
    if (name == "rim") return rim_maze();
    throw std::invalid_argument("unknown maze preset: " + name);
}

}  // namespace presets

}  // namespace vast
