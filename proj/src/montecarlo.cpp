#include "fdmix/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <tuple>

#include "fdmix/errors.hpp"
#include "parallel.hpp"

namespace fdmix {

namespace {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform grid over the torus holding BS indices. For each grid square it can
// list every BS that is nearest to at least one point of that square.
class BsGrid {
public:
    BsGrid(const std::vector<Point>& points, double side) : points_(points), side_(side) {
        m_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(2.0 * double(points.size()))));
        cell_ = side / double(m_);
        start_.assign(m_ * m_ + 1, 0);
        std::vector<std::size_t> key(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            key[i] = coord(points[i].y) * m_ + coord(points[i].x);
            ++start_[key[i] + 1];
        }
        std::partial_sum(start_.begin(), start_.end(), start_.begin());
        members_.resize(points.size());
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::size_t i = 0; i < points.size(); ++i) members_[fill[key[i]]++] = int(i);
    }

    std::size_t squares() const { return m_; }
    double square_size() const { return cell_; }

    void candidates(std::size_t gx, std::size_t gy, std::vector<int>& out) const {
        out.clear();
        const long m = long(m_);
        if (m < 5) {
            for (std::size_t i = 0; i < points_.size(); ++i) out.push_back(int(i));
            return;
        }
        const double cx = (double(gx) + 0.5) * cell_;
        const double cy = (double(gy) + 0.5) * cell_;
        // bound: the smallest farthest-point distance from any BS to the square
        double bound2 = std::numeric_limits<double>::infinity();
        scratch_.clear();
        for (long r = 0;; ++r) {
            for (long dy = -r; dy <= r; ++dy) {
                const bool edge_row = (dy == -r || dy == r);
                const std::size_t sy = wrap(long(gy) + dy, m);
                for (long dx = -r; dx <= r; dx += edge_row ? 1 : 2 * r) {
                    const std::size_t g = sy * m_ + wrap(long(gx) + dx, m);
                    for (std::size_t k = start_[g]; k < start_[g + 1]; ++k) {
                        const Point& b = points_[std::size_t(members_[k])];
                        const double ax = axis_offset(b.x, cx);
                        const double ay = axis_offset(b.y, cy);
                        const double far_x = ax + 0.5 * cell_;
                        const double far_y = ay + 0.5 * cell_;
                        bound2 = std::min(bound2, far_x * far_x + far_y * far_y);
                        const double near_x = std::max(0.0, ax - 0.5 * cell_);
                        const double near_y = std::max(0.0, ay - 0.5 * cell_);
                        scratch_.push_back({members_[k], near_x * near_x + near_y * near_y});
                    }
                    if (r == 0) break;
                }
            }
            if (2 * r + 3 >= m) {
                for (std::size_t i = 0; i < points_.size(); ++i) out.push_back(int(i));
                return;
            }
            // Squares in ring r + 1 and beyond are at least r * cell away.
            const double reach = double(r) * cell_;
            if (bound2 < reach * reach) break;
        }
        for (const auto& c : scratch_)
            if (c.second <= bound2) out.push_back(c.first);
        std::sort(out.begin(), out.end());
    }

    // Lowest-index BS among the candidates at minimal torus distance.
    int nearest_among(const Point& p, const std::vector<int>& candidates) const {
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int idx : candidates) {
            const Point& b = points_[std::size_t(idx)];
            const double dx = axis_offset(p.x, b.x);
            const double dy = axis_offset(p.y, b.y);
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = idx;
            }
        }
        return best;
    }

private:
    // Valid for |i| < 2m, which the ring bound guarantees.
    static std::size_t wrap(long i, long m) {
        if (i < 0) i += m;
        else if (i >= m) i -= m;
        return std::size_t(i);
    }
    std::size_t coord(double v) const {
        return std::min(m_ - 1, static_cast<std::size_t>(std::max(0.0, v / cell_)));
    }
    double axis_offset(double a, double b) const {
        const double d = std::abs(a - b);
        return d > 0.5 * side_ ? side_ - d : d;
    }

    const std::vector<Point>& points_;
    double side_;
    std::size_t m_ = 1;
    double cell_ = 1.0;
    std::vector<std::size_t> start_;
    std::vector<int> members_;
    mutable std::vector<std::pair<int, double>> scratch_;
};

BsMode draw_mode(Rng& rng, const DuplexMix& mix) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u < mix.rho_f) return BsMode::FullDuplex;
    if (u < mix.rho_f + mix.rho_d) return BsMode::HalfDuplexDl;
    return BsMode::HalfDuplexUl;
}

FadeSet draw_fades(Rng& rng, std::size_t cells, double rate) {
    std::exponential_distribution<double> fade(rate);
    FadeSet f;
    f.from_bs.resize(cells);
    f.from_ul_ue.resize(cells);
    for (auto& v : f.from_bs) v = fade(rng);
    for (auto& v : f.from_ul_ue) v = fade(rng);
    return f;
}

int pick_tagged(const DropRealization& drop, bool downlink, TaggingRule rule, Rng& rng) {
    std::vector<int> serving;
    for (std::size_t c = 0; c < drop.scheduled.size(); ++c)
        if (downlink ? drop.transmits_dl(c) : drop.receives_ul(c)) serving.push_back(int(c));
    if (serving.empty()) return -1;
    if (rule == TaggingRule::UniformCell) {
        std::uniform_int_distribution<std::size_t> pick(0, serving.size() - 1);
        return serving[pick(rng)];
    }
    const Point center{0.5 * drop.side, 0.5 * drop.side};
    int best = serving.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (int c : serving) {
        const double d = torus_distance(center, drop.bs_positions[std::size_t(c)], drop.side);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

// Transmit power of cell k's uplink UE under fractional power control.
double ue_tx_power(const DropRealization& drop, std::size_t k, const Scenario& scn) {
    const double eps = scn.power.power_control_eps;
    if (eps == 0.0) return scn.power.p_ue;
    const auto& link = scn.env.link_bs_ue;
    const double z = torus_distance(drop.ue_positions[std::size_t(drop.scheduled[k].ul_ue)],
                                    drop.bs_positions[k], drop.side);
    return scn.power.p_ue * std::pow(link.attenuation, -eps) * std::pow(z, eps * link.exponent);
}

double ratio_or_censor(double signal, double denominator) {
    if (denominator <= 0.0) return kSinrCensor;
    return signal / denominator;
}

std::size_t mode_index(BsMode m) { return static_cast<std::size_t>(m); }

}  // namespace

const char* to_string(BsMode m) {
    switch (m) {
    case BsMode::FullDuplex: return "fd";
    case BsMode::HalfDuplexDl: return "hd_dl";
    case BsMode::HalfDuplexUl: return "hd_ul";
    }
    return "?";
}

void validate(const SimWindow& window, const RadioEnvironment& env) {
    if (!(window.half_width > 0.0) || !std::isfinite(window.half_width))
        throw InvalidParameter("simulation.half_width must be positive");
    if (window.num_drops < 1) throw TooFewSamples("simulation.drops must be at least 1");
    if (env.bs_density * window.area() < 100.0)
        throw InvalidParameter("simulation window holds fewer than 100 BSs on average");
}

bool DropRealization::transmits_dl(std::size_t cell) const {
    return !scheduled[cell].skipped && scheduled[cell].dl_ue >= 0;
}

bool DropRealization::receives_ul(std::size_t cell) const {
    return !scheduled[cell].skipped && scheduled[cell].ul_ue >= 0;
}

double torus_distance(const Point& a, const Point& b, double side) {
    double dx = std::abs(a.x - b.x);
    double dy = std::abs(a.y - b.y);
    if (dx > 0.5 * side) dx = side - dx;
    if (dy > 0.5 * side) dy = side - dy;
    return std::hypot(dx, dy);
}

std::uint64_t drop_seed(std::uint64_t master_seed, std::uint64_t drop_index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(drop_index + 0x632be59bd9b4e019ULL));
}

DropRealization generate_drop(const RadioEnvironment& env, const DuplexMix& mix,
                              const SimWindow& window, std::uint64_t drop_index) {
    validate(window, env);
    validate(mix);
    Rng rng(drop_seed(window.master_seed, drop_index));
    DropRealization drop;
    drop.side = window.side();
    const double area = window.area();
    std::uniform_real_distribution<double> coord(0.0, drop.side);

    std::poisson_distribution<std::size_t> bs_count(env.bs_density * area);
    std::size_t n_bs = bs_count(rng);
    const std::size_t min_bs = std::max<std::size_t>(1, window.min_bs_per_drop);
    while (n_bs < min_bs) {
        ++drop.empty_resamples;
        if (drop.empty_resamples > 1000) throw EmptyDrop("drop keeps coming up without BSs");
        n_bs = bs_count(rng);
    }
    drop.bs_positions.resize(n_bs);
    for (auto& p : drop.bs_positions) p = {coord(rng), coord(rng)};
    drop.bs_modes.resize(n_bs);
    for (auto& m : drop.bs_modes) m = draw_mode(rng, mix);

    // UEs are dropped square by square, which is the same Poisson process and
    // lets every square resolve association against a short candidate list.
    const BsGrid grid(drop.bs_positions, drop.side);
    const std::size_t m = grid.squares();
    const double sq = grid.square_size();
    std::poisson_distribution<std::size_t> ue_count(env.ue_density * sq * sq);
    std::uniform_real_distribution<double> offset(0.0, sq);
    std::vector<int> candidates;
    std::vector<std::size_t> start(n_bs + 1, 0);
    for (std::size_t gy = 0; gy < m; ++gy) {
        for (std::size_t gx = 0; gx < m; ++gx) {
            const std::size_t n = ue_count(rng);
            if (n == 0) continue;
            grid.candidates(gx, gy, candidates);
            for (std::size_t i = 0; i < n; ++i) {
                const Point p{double(gx) * sq + offset(rng), double(gy) * sq + offset(rng)};
                const int bs = grid.nearest_among(p, candidates);
                drop.ue_positions.push_back(p);
                drop.associations.push_back(bs);
                ++start[std::size_t(bs) + 1];
            }
        }
    }
    const std::size_t n_ue = drop.ue_positions.size();
    std::partial_sum(start.begin(), start.end(), start.begin());
    std::vector<int> members(n_ue);
    {
        std::vector<std::size_t> fill(start.begin(), start.end() - 1);
        for (std::size_t u = 0; u < n_ue; ++u)
            members[fill[std::size_t(drop.associations[u])]++] = int(u);
    }

    drop.scheduled.resize(n_bs);
    for (std::size_t c = 0; c < n_bs; ++c) {
        const std::size_t needed = drop.bs_modes[c] == BsMode::FullDuplex ? 2 : 1;
        const std::size_t have = start[c + 1] - start[c];
        CellSchedule& s = drop.scheduled[c];
        if (have < needed) {
            s.skipped = true;
            continue;
        }
        // Partial Fisher-Yates: uniform choice without replacement.
        int* first = members.data() + start[c];
        for (std::size_t i = 0; i < needed; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, have - 1);
            std::swap(first[i], first[pick(rng)]);
        }
        switch (drop.bs_modes[c]) {
        case BsMode::FullDuplex:
            s.dl_ue = first[0];
            s.ul_ue = first[1];
            break;
        case BsMode::HalfDuplexDl: s.dl_ue = first[0]; break;
        case BsMode::HalfDuplexUl: s.ul_ue = first[0]; break;
        }
    }

    drop.dl_fades = draw_fades(rng, n_bs, env.fading_rate);
    drop.ul_fades = draw_fades(rng, n_bs, env.fading_rate);
    drop.tagged_dl_cell = pick_tagged(drop, true, window.tagging, rng);
    drop.tagged_ul_cell = pick_tagged(drop, false, window.tagging, rng);
    return drop;
}

double sample_sinr_downlink(const DropRealization& drop, const Scenario& scn, int tagged_cell) {
    if (tagged_cell < 0 || std::size_t(tagged_cell) >= drop.scheduled.size() ||
        !drop.transmits_dl(std::size_t(tagged_cell)))
        throw InvalidParameter("tagged cell has no scheduled downlink UE");
    const auto& env = scn.env;
    const auto& fades = drop.dl_fades;
    const std::size_t c = std::size_t(tagged_cell);
    const Point& rx = drop.ue_positions[std::size_t(drop.scheduled[c].dl_ue)];
    const auto& l1 = env.link_bs_ue;
    const auto& l2 = env.link_ue_ue;

    const double r = torus_distance(rx, drop.bs_positions[c], drop.side);
    const double signal = scn.power.p_bs * fades.from_bs[c] * l1.attenuation * std::pow(r, -l1.exponent);
    double interference = 0.0;
    for (std::size_t b = 0; b < drop.scheduled.size(); ++b) {
        if (drop.transmits_dl(b) && b != c) {
            const double d = torus_distance(rx, drop.bs_positions[b], drop.side);
            interference +=
                scn.power.p_bs * fades.from_bs[b] * l1.attenuation * std::pow(d, -l1.exponent);
        }
        // Every active uplink UE interferes, the tagged FD cell's own included.
        if (drop.receives_ul(b)) {
            const Point& ue = drop.ue_positions[std::size_t(drop.scheduled[b].ul_ue)];
            const double d = torus_distance(rx, ue, drop.side);
            interference += ue_tx_power(drop, b, scn) * fades.from_ul_ue[b] * l2.attenuation *
                            std::pow(d, -l2.exponent);
        }
    }
    return ratio_or_censor(signal, interference + effective_noise_dl(scn));
}

double sample_sinr_uplink(const DropRealization& drop, const Scenario& scn, int tagged_cell) {
    if (tagged_cell < 0 || std::size_t(tagged_cell) >= drop.scheduled.size() ||
        !drop.receives_ul(std::size_t(tagged_cell)))
        throw InvalidParameter("tagged cell has no scheduled uplink UE");
    const auto& env = scn.env;
    const auto& fades = drop.ul_fades;
    const std::size_t c = std::size_t(tagged_cell);
    const Point& rx = drop.bs_positions[c];
    const auto& l1 = env.link_bs_ue;
    const auto& l3 = env.link_bs_bs;

    const Point& own = drop.ue_positions[std::size_t(drop.scheduled[c].ul_ue)];
    const double z = torus_distance(own, rx, drop.side);
    const double signal =
        ue_tx_power(drop, c, scn) * fades.from_ul_ue[c] * l1.attenuation * std::pow(z, -l1.exponent);
    double interference = 0.0;
    for (std::size_t b = 0; b < drop.scheduled.size(); ++b) {
        if (b == c) continue;
        if (drop.transmits_dl(b)) {
            const double d = torus_distance(rx, drop.bs_positions[b], drop.side);
            interference +=
                scn.power.p_bs * fades.from_bs[b] * l3.attenuation * std::pow(d, -l3.exponent);
        }
        if (drop.receives_ul(b)) {
            const Point& ue = drop.ue_positions[std::size_t(drop.scheduled[b].ul_ue)];
            const double d = torus_distance(rx, ue, drop.side);
            interference += ue_tx_power(drop, b, scn) * fades.from_ul_ue[b] * l1.attenuation *
                            std::pow(d, -l1.exponent);
        }
    }
    double floor = effective_noise_ul(scn);
    if (drop.bs_modes[c] == BsMode::FullDuplex) floor += effective_self_interference(scn);
    return ratio_or_censor(signal, interference + floor);
}

double dkw_half_width(std::size_t n, double confidence) {
    if (n == 0) throw TooFewSamples("DKW band needs at least one sample");
    return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * double(n)));
}

EmpiricalCurve empirical_distribution(const std::vector<double>& sinr_linear,
                                      const std::vector<double>& grid_db) {
    if (sinr_linear.size() < 1000)
        throw TooFewSamples("empirical distribution needs at least 1000 samples, got " +
                            std::to_string(sinr_linear.size()));
    std::vector<double> sorted = sinr_linear;
    std::sort(sorted.begin(), sorted.end());
    EmpiricalCurve out;
    out.samples = sorted.size();
    out.dkw_half_width = dkw_half_width(sorted.size());
    out.ccdf.thresholds_db = grid_db;
    out.ccdf.probabilities.reserve(grid_db.size());
    const double n = double(sorted.size());
    for (double t : grid_db) {
        const double y = db_to_linear(t);
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), y);
        out.ccdf.probabilities.push_back(double(above) / n);
    }
    return out;
}

double SimulationResult::skip_rate() const {
    const std::size_t cells = cells_by_mode[0] + cells_by_mode[1] + cells_by_mode[2];
    if (cells == 0) return 0.0;
    return double(skipped_by_mode[0] + skipped_by_mode[1] + skipped_by_mode[2]) / double(cells);
}

std::vector<double> SimulationResult::sinr(Direction dir) const {
    const auto& src = dir == Direction::Downlink ? downlink : uplink;
    std::vector<double> v;
    v.reserve(src.size());
    for (const auto& s : src) v.push_back(s.sinr);
    return v;
}

std::vector<double> SimulationResult::sinr(Direction dir, BsMode mode) const {
    const auto& src = dir == Direction::Downlink ? downlink : uplink;
    std::vector<double> v;
    for (const auto& s : src)
        if (s.mode == mode) v.push_back(s.sinr);
    return v;
}

double SimulationResult::mean_rate(Direction dir) const {
    const auto& src = dir == Direction::Downlink ? downlink : uplink;
    if (src.empty()) throw TooFewSamples("no tagged samples for the mean rate");
    double sum = 0.0;
    for (const auto& s : src) sum += std::log2(1.0 + s.sinr);
    return sum / double(src.size());
}

double SimulationResult::coverage(Direction dir, double threshold_db) const {
    const auto& src = dir == Direction::Downlink ? downlink : uplink;
    if (src.empty()) throw TooFewSamples("no tagged samples for coverage");
    const double y = db_to_linear(threshold_db);
    std::size_t hit = 0;
    for (const auto& s : src) hit += s.sinr > y;
    return double(hit) / double(src.size());
}

double SimulationResult::ase(Direction dir) const {
    const std::size_t serving = dir == Direction::Downlink ? dl_serving_cells : ul_serving_cells;
    if (drops == 0 || area <= 0.0) throw TooFewSamples("no drops simulated");
    return double(serving) / (double(drops) * area) * mean_rate(dir);
}

SimulationResult simulate(const Scenario& scn, const SimWindow& window) {
    validate(scn);
    validate(window, scn.env);

    struct Outcome {
        TaggedSample dl, ul;
        bool has_dl = false, has_ul = false;
        std::size_t empty_resamples = 0, bs = 0, ue = 0, dl_cells = 0, ul_cells = 0;
        std::size_t cells[3] = {0, 0, 0};
        std::size_t skipped[3] = {0, 0, 0};
    };
    std::vector<Outcome> outcomes(window.num_drops);
    detail::parallel_for(window.num_drops, window.threads, [&](std::size_t i) {
        const DropRealization drop = generate_drop(scn.env, scn.mix, window, i);
        Outcome& o = outcomes[i];
        o.empty_resamples = drop.empty_resamples;
        o.bs = drop.bs_positions.size();
        o.ue = drop.ue_positions.size();
        for (std::size_t c = 0; c < drop.scheduled.size(); ++c) {
            const std::size_t m = mode_index(drop.bs_modes[c]);
            ++o.cells[m];
            if (drop.scheduled[c].skipped) ++o.skipped[m];
            o.dl_cells += drop.transmits_dl(c);
            o.ul_cells += drop.receives_ul(c);
        }
        if (drop.tagged_dl_cell >= 0) {
            const std::size_t c = std::size_t(drop.tagged_dl_cell);
            o.has_dl = true;
            o.dl.sinr = sample_sinr_downlink(drop, scn, drop.tagged_dl_cell);
            o.dl.censored = o.dl.sinr == kSinrCensor;
            o.dl.mode = drop.bs_modes[c];
            o.dl.distance = torus_distance(
                drop.ue_positions[std::size_t(drop.scheduled[c].dl_ue)], drop.bs_positions[c], drop.side);
        }
        if (drop.tagged_ul_cell >= 0) {
            const std::size_t c = std::size_t(drop.tagged_ul_cell);
            o.has_ul = true;
            o.ul.sinr = sample_sinr_uplink(drop, scn, drop.tagged_ul_cell);
            o.ul.censored = o.ul.sinr == kSinrCensor;
            o.ul.mode = drop.bs_modes[c];
            o.ul.distance = torus_distance(
                drop.ue_positions[std::size_t(drop.scheduled[c].ul_ue)], drop.bs_positions[c], drop.side);
        }
    });

    SimulationResult res;
    res.drops = window.num_drops;
    res.area = window.area();
    for (const auto& o : outcomes) {
        if (o.has_dl) res.downlink.push_back(o.dl);
        if (o.has_ul) res.uplink.push_back(o.ul);
        res.empty_resamples += o.empty_resamples;
        res.bs_total += o.bs;
        res.ue_total += o.ue;
        res.dl_serving_cells += o.dl_cells;
        res.ul_serving_cells += o.ul_cells;
        for (std::size_t m = 0; m < 3; ++m) {
            res.cells_by_mode[m] += o.cells[m];
            res.skipped_by_mode[m] += o.skipped[m];
        }
    }
    return res;
}

DistanceHistogram fit_distance_law(const std::vector<double>& distances, double density,
                                   std::size_t min_samples) {
    if (distances.empty() || distances.size() < min_samples)
        throw TooFewSamples("distance fit needs at least " + std::to_string(min_samples) +
                            " samples, got " + std::to_string(distances.size()));
    std::vector<double> sorted = distances;
    std::sort(sorted.begin(), sorted.end());
    const double n = double(sorted.size());

    DistanceHistogram h;
    h.samples = sorted.size();
    constexpr std::size_t bins = 60;
    const double top = sorted.back() > 0.0 ? sorted.back() : 1.0;
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = top * double(i) / double(bins);
    h.counts.assign(bins, 0);
    for (double d : sorted) ++h.counts[std::min(bins - 1, std::size_t(d / top * double(bins)))];

    std::vector<double> emp_cdf(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        emp_cdf[i] = double(std::upper_bound(sorted.begin(), sorted.end(), h.edges[i]) -
                            sorted.begin()) / n;
    auto loss = [&](double nu) {
        double s = 0.0;
        for (std::size_t i = 0; i <= bins; ++i) {
            const double e = emp_cdf[i] - nearest_distance_cdf(h.edges[i], density, nu);
            s += e * e;
        }
        return s;
    };
    // Golden-section search on log(nu).
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(0.1);
    double b = std::log(10.0);
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double f1 = loss(std::exp(x1));
    double f2 = loss(std::exp(x2));
    while (b - a > 1e-7) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = loss(std::exp(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = loss(std::exp(x2));
        }
    }
    h.fitted_nu = std::exp(0.5 * (a + b));
    h.fit_rms = std::sqrt(loss(h.fitted_nu) / double(bins + 1));
    return h;
}

DistanceFit measure_distance_pdf(const std::vector<DropRealization>& drops, double bs_density) {
    std::vector<double> dl, ul, all;
    for (const auto& drop : drops) {
        for (std::size_t c = 0; c < drop.scheduled.size(); ++c) {
            const auto& s = drop.scheduled[c];
            if (s.skipped) continue;
            if (s.dl_ue >= 0)
                dl.push_back(torus_distance(drop.ue_positions[std::size_t(s.dl_ue)],
                                            drop.bs_positions[c], drop.side));
            if (s.ul_ue >= 0)
                ul.push_back(torus_distance(drop.ue_positions[std::size_t(s.ul_ue)],
                                            drop.bs_positions[c], drop.side));
        }
        for (std::size_t u = 0; u < drop.ue_positions.size(); ++u)
            all.push_back(torus_distance(drop.ue_positions[u],
                                         drop.bs_positions[std::size_t(drop.associations[u])],
                                         drop.side));
    }
    DistanceFit fit;
    fit.downlink = fit_distance_law(dl, bs_density);
    fit.uplink = fit_distance_law(ul, bs_density);
    fit.all_ues = fit_distance_law(all, bs_density);
    return fit;
}

const BenchmarkCurve& BenchmarkReport::find(Direction dir, double nu) const {
    for (const auto& c : curves)
        if (c.direction == dir && std::abs(c.nu - nu) < 1e-12) return c;
    throw InvalidParameter("benchmark report has no curve for the requested direction and nu");
}

double mixed_ccdf(Direction dir, double y, const Scenario& scn) {
    const auto& mix = scn.mix;
    const double other = dir == Direction::Downlink ? mix.rho_d : mix.rho_u;
    const double weight = mix.rho_f + other;
    if (!(weight > 0.0))
        throw DegenerateMix(std::string("no cells serve the ") +
                            (dir == Direction::Downlink ? "downlink" : "uplink"));
    double v = 0.0;
    if (mix.rho_f > 0.0) v += mix.rho_f * ccdf(dir, CellMode::FullDuplex, y, scn);
    if (other > 0.0) v += other * ccdf(dir, CellMode::HalfDuplex, y, scn);
    return v / weight;
}

std::pair<double, double> curve_deviation(const DistributionCurve& a, const DistributionCurve& b) {
    if (a.size() != b.size() || a.size() == 0)
        throw InvalidParameter("curves must share a non-empty threshold grid");
    double max_dev = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.thresholds_db[i] != b.thresholds_db[i])
            throw InvalidParameter("curves must share a threshold grid");
        const double d = std::abs(a.probabilities[i] - b.probabilities[i]);
        max_dev = std::max(max_dev, d);
        sum += d;
    }
    return {max_dev, sum / double(a.size())};
}

BenchmarkReport benchmark_report(const Scenario& scn, const SimWindow& window,
                                 const BenchmarkOptions& options) {
    return benchmark_report(scn, simulate(scn, window), options);
}

BenchmarkReport benchmark_report(const Scenario& scn, const SimulationResult& sim,
                                 const BenchmarkOptions& options) {
    const auto grid = threshold_grid(options.lo_db, options.hi_db, options.step_db);
    BenchmarkReport report;
    report.simulation = sim;
    for (Direction dir : {Direction::Downlink, Direction::Uplink}) {
        const EmpiricalCurve emp = empirical_distribution(sim.sinr(dir), grid);
        (dir == Direction::Downlink ? report.dkw_dl : report.dkw_ul) = emp.dkw_half_width;
        for (double nu : options.nus) {
            Scenario s = scn;
            (dir == Direction::Downlink ? s.env.nu_dl : s.env.nu_ul) = nu;
            BenchmarkCurve c;
            c.direction = dir;
            c.nu = nu;
            c.empirical = emp.ccdf;
            c.analytic.thresholds_db = grid;
            for (double t : grid) c.analytic.probabilities.push_back(mixed_ccdf(dir, db_to_linear(t), s));
            std::tie(c.max_deviation, c.mean_deviation) = curve_deviation(c.analytic, c.empirical);
            report.curves.push_back(std::move(c));
        }
    }
    return report;
}

void write_samples(std::ostream& out, const SimulationResult& sim, const SampleFileHeader& header) {
    out << "# fdmix tagged SINR samples\n";
    out << "# grid=" << header.grid << "\n";
    out << "# seed=" << header.seed << "\n";
    out << "# scenario_hash=" << header.scenario_hash << "\n";
    out << "# drops=" << sim.drops << "\n";
    out << "direction,mode,sinr_db,distance_m,censored\n";
    char buf[96];
    for (Direction dir : {Direction::Downlink, Direction::Uplink}) {
        for (const auto& s : dir == Direction::Downlink ? sim.downlink : sim.uplink) {
            std::snprintf(buf, sizeof buf, "%s,%s,%.10g,%.10g,%d\n", to_string(dir),
                          to_string(s.mode), linear_to_db(s.sinr), s.distance, s.censored ? 1 : 0);
            out << buf;
        }
    }
}

}  // namespace fdmix
