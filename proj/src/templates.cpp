#include "hpr/templates.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace hpr {

namespace {

constexpr std::uint32_t kNil = std::numeric_limits<std::uint32_t>::max();

// Matching state over the base bipartite projection: left side Y_1, right
// side Y_0 minus the current removed set. Supports incremental removal and
// restore so subset enumeration costs ~one augmentation per step.
class FlexMatcher {
public:
    explicit FlexMatcher(const Template& t)
        : y0_(static_cast<std::uint32_t>(t.y0_size())), left_(3 * static_cast<std::uint32_t>(t.m)) {
        adj_.resize(left_);
        for (std::size_t j = 0; j < t.edge_count(); ++j) {
            auto e = t.edge(j);
            adj_[e[1] - y0_].push_back(static_cast<std::uint32_t>(j));
            rights_.push_back(e[0]);
        }
        reset();
    }

    void reset() {
        match_l_.assign(left_, kNil);  // left -> edge index
        match_r_.assign(y0_, kNil);    // right -> left
        removed_.assign(y0_, 0);
        visited_.assign(left_, 0);
        stamp_ = 0;
        matched_ = 0;
    }

    void remove_vertex(std::uint32_t v) {
        removed_[v] = 1;
        std::uint32_t u = match_r_[v];
        if (u == kNil) return;
        match_r_[v] = kNil;
        match_l_[u] = kNil;
        matched_--;
    }

    void restore_vertex(std::uint32_t v) { removed_[v] = 0; }

    // Try to complete a left-perfect matching; returns false if stuck.
    bool complete() {
        if (matched_ == left_) return true;
        bool ok = true;
        for (std::uint32_t u = 0; u < left_; ++u)
            if (match_l_[u] == kNil && !augment_from(u)) ok = false;
        return ok;
    }

    bool perfect() const { return matched_ == left_; }

    std::uint32_t matched_edge(std::uint32_t u) const { return match_l_[u]; }
    std::uint32_t left_size() const { return left_; }

private:
    bool augment_from(std::uint32_t u0) {
        stamp_++;
        if (dfs(u0)) {
            matched_++;
            return true;
        }
        return false;
    }

    bool dfs(std::uint32_t u) {
        visited_[u] = stamp_;
        for (std::uint32_t ei : adj_[u]) {
            std::uint32_t v = rights_[ei];
            if (removed_[v]) continue;
            std::uint32_t w = match_r_[v];
            if (w == kNil) {
                match_r_[v] = u;
                match_l_[u] = ei;
                return true;
            }
        }
        for (std::uint32_t ei : adj_[u]) {
            std::uint32_t v = rights_[ei];
            if (removed_[v]) continue;
            std::uint32_t w = match_r_[v];
            if (w == kNil || visited_[w] == stamp_) continue;
            if (dfs(w)) {
                match_r_[v] = u;
                match_l_[u] = ei;
                return true;
            }
        }
        return false;
    }

    std::uint32_t y0_, left_;
    std::vector<std::vector<std::uint32_t>> adj_;  // left -> incident edge indices
    std::vector<std::uint32_t> rights_;            // edge index -> right vertex
    std::vector<std::uint32_t> match_l_, match_r_;
    std::vector<std::uint8_t> removed_;
    std::vector<std::uint64_t> visited_;
    std::uint64_t stamp_ = 0;
    std::size_t matched_ = 0;
};

Template base_projection(const Template& t) {
    if (t.r == 2) return t;
    Template base = t;
    base.r = 2;
    base.edges.clear();
    for (std::size_t j = 0; j < t.edge_count(); ++j) {
        auto e = t.edge(j);
        base.edges.push_back(e[0]);
        base.edges.push_back(e[1]);
    }
    return base;
}

// Revolving-door order: all t-subsets of [0, n), consecutive sets differing
// by one swap. Knuth 7.2.1.3 homogeneous scheme via explicit recursion.
void revolving_door(int n, int t, std::vector<std::vector<std::uint32_t>>& out) {
    if (t == 0) {
        out.push_back({});
        return;
    }
    if (t == n) {
        std::vector<std::uint32_t> all(t);
        for (int i = 0; i < t; ++i) all[i] = static_cast<std::uint32_t>(i);
        out.push_back(std::move(all));
        return;
    }
    std::vector<std::vector<std::uint32_t>> head, tail;
    revolving_door(n - 1, t, head);
    revolving_door(n - 1, t - 1, tail);
    out.reserve(out.size() + head.size() + tail.size());
    for (auto& s : head) out.push_back(std::move(s));
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) {
        it->push_back(static_cast<std::uint32_t>(n - 1));
        out.push_back(std::move(*it));
    }
}

// Shared enumeration core: runs over subsets with incremental matcher
// repair (complete() re-augments after each diff, so a failing subset does
// not poison later ones). Stops after max_failures, recording the first
// failing subset.
template <typename SubsetSource>
std::size_t scan_subsets(FlexMatcher& matcher, SubsetSource&& next, std::size_t count,
                         std::size_t max_failures, std::size_t& checked,
                         std::optional<std::vector<std::uint32_t>>& first_witness) {
    std::vector<std::uint32_t> prev;
    bool first = true;
    std::size_t failures = 0;
    for (std::size_t step = 0; step < count; ++step) {
        std::vector<std::uint32_t> cur = next(step);
        if (first) {
            matcher.reset();
            for (std::uint32_t v : cur) matcher.remove_vertex(v);
            first = false;
        } else {
            for (std::uint32_t v : prev)
                if (!std::binary_search(cur.begin(), cur.end(), v)) matcher.restore_vertex(v);
            for (std::uint32_t v : cur)
                if (!std::binary_search(prev.begin(), prev.end(), v)) matcher.remove_vertex(v);
        }
        bool ok = matcher.complete();
        checked++;
        if (!ok) {
            failures++;
            if (!first_witness) first_witness = cur;
            if (failures >= max_failures) return failures;
        }
        prev = std::move(cur);
    }
    return failures;
}

}  // namespace

int Template::max_degree() const {
    std::vector<int> deg(vertex_count(), 0);
    for (std::size_t j = 0; j < edge_count(); ++j)
        for (std::uint32_t v : edge(j)) deg[v]++;
    int best = 0;
    for (int d : deg) best = std::max(best, d);
    return best;
}

FlexReport verify_flexibility(const Template& t, bool exhaustive, std::size_t budget, int trials,
                              std::uint64_t seed) {
    if (t.m < 1) throw std::invalid_argument("verify_flexibility: m < 1");
    FlexReport rep;
    Template base = base_projection(t);
    FlexMatcher matcher(base);
    const std::size_t zn = t.z_size(), m = static_cast<std::size_t>(t.m);
    if (exhaustive) {
        uint128 total = binom128(zn, static_cast<unsigned>(m));
        if (total > budget) throw std::invalid_argument("verify_flexibility: exhaustive budget exceeded");
        rep.exhaustive = true;
        std::vector<std::vector<std::uint32_t>> subsets;
        revolving_door(static_cast<int>(zn), static_cast<int>(m), subsets);
        for (auto& s : subsets) std::sort(s.begin(), s.end());
        std::size_t fails = scan_subsets(
            matcher, [&](std::size_t i) { return subsets[i]; }, subsets.size(), 1, rep.checked,
            rep.witness);
        rep.pass = fails == 0;
        return rep;
    }
    Rng rng = Rng::stream(seed, 0x5a11);
    std::size_t fails = scan_subsets(
        matcher,
        [&](std::size_t) {
            auto picks = rng.distinct(zn, m);
            return std::vector<std::uint32_t>(picks.begin(), picks.end());
        },
        static_cast<std::size_t>(trials), 1, rep.checked, rep.witness);
    rep.pass = fails == 0;  // sampled: "no counterexample found"
    return rep;
}

Template extend_template(const Template& t2, int r_target) {
    if (t2.r != 2) throw std::invalid_argument("extend_template: base must have r = 2");
    if (r_target < 2) throw std::invalid_argument("extend_template: r_target < 2");
    if (r_target == 2) return t2;
    Template out = t2;
    out.r = r_target;
    out.edges.clear();
    const std::uint32_t y0 = static_cast<std::uint32_t>(t2.y0_size());
    const std::uint32_t part = static_cast<std::uint32_t>(3 * t2.m);
    for (std::size_t j = 0; j < t2.edge_count(); ++j) {
        auto e = t2.edge(j);
        out.edges.push_back(e[0]);
        out.edges.push_back(e[1]);
        std::uint32_t local = e[1] - y0;
        for (int i = 2; i < r_target; ++i)
            out.edges.push_back(y0 + part * static_cast<std::uint32_t>(i - 1) + local);
    }
    return out;
}

std::optional<std::vector<std::uint32_t>> matching_after_removal(const Template& t,
                                                                 std::span<const std::uint32_t> zprime) {
    if (zprime.size() != static_cast<std::size_t>(t.m))
        throw std::invalid_argument("matching_after_removal: |Z'| != m");
    std::set<std::uint32_t> zs(zprime.begin(), zprime.end());
    if (zs.size() != zprime.size()) throw std::invalid_argument("matching_after_removal: repeated vertex");
    for (std::uint32_t z : zprime)
        if (z >= t.z_size()) throw std::invalid_argument("matching_after_removal: vertex outside Z");
    Template base = base_projection(t);
    FlexMatcher matcher(base);
    for (std::uint32_t z : zprime) matcher.remove_vertex(z);
    if (!matcher.complete()) return std::nullopt;
    std::vector<std::uint32_t> out(matcher.left_size());
    for (std::uint32_t u = 0; u < matcher.left_size(); ++u) out[u] = matcher.matched_edge(u);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// One randomized bipartite attempt. The backbone gives every Y_1 vertex one
// neighbour in Y_0 \ Z and one in Z; further rounds spread extra Z- and
// F-edges evenly. Degrees escalate slowly across attempts.
Template random_candidate(int m, std::uint64_t seed, int attempt) {
    const std::uint32_t zn = 2 * static_cast<std::uint32_t>(m);
    const std::uint32_t y0 = 4 * static_cast<std::uint32_t>(m);
    const std::uint32_t y1n = 3 * static_cast<std::uint32_t>(m);
    Rng rng = Rng::stream(seed, 1000 + static_cast<std::uint64_t>(attempt));
    int extra_z = 2 + attempt % 3 + attempt / 10;
    int extra_f = 1 + (attempt % 2) + attempt / 16;

    std::set<std::pair<std::uint32_t, std::uint32_t>> es;
    std::vector<std::uint32_t> fperm(y1n), zperm(y1n);
    for (std::uint32_t i = 0; i < y1n; ++i) fperm[i] = i % (2 * m);
    for (std::uint32_t i = 0; i < y1n; ++i) zperm[i] = i % (2 * m);
    rng.shuffle(fperm);
    rng.shuffle(zperm);
    for (std::uint32_t i = 0; i < y1n; ++i) es.insert({zn + fperm[i], y0 + i});
    for (std::uint32_t i = 0; i < y1n; ++i) es.insert({zperm[i], y0 + i});
    std::vector<std::uint32_t> targets(y1n);
    for (std::uint32_t i = 0; i < y1n; ++i) targets[i] = y0 + i;
    for (int round = 0; round < extra_z; ++round) {
        rng.shuffle(targets);
        for (std::uint32_t z = 0; z < zn; ++z) es.insert({z, targets[z % y1n]});
    }
    for (int round = 0; round < extra_f; ++round) {
        rng.shuffle(targets);
        for (std::uint32_t f = zn; f < y0; ++f) es.insert({f, targets[(f - zn) % y1n]});
    }
    Template cand;
    cand.r = 2;
    cand.m = m;
    cand.seed = seed;
    for (auto& [a, b] : es) {
        cand.edges.push_back(a);
        cand.edges.push_back(b);
    }
    return cand;
}

bool flexible(const Template& cand, bool exhaustive, const TemplateOptions& opt, std::uint64_t seed) {
    return verify_flexibility(cand, exhaustive, opt.exhaustive_budget, opt.sampled_trials, seed).pass;
}

// Number of failing removals, capped; exhaustive enumeration only.
std::size_t count_failures(const Template& cand, std::size_t cap) {
    Template base = base_projection(cand);
    FlexMatcher matcher(base);
    std::vector<std::vector<std::uint32_t>> subsets;
    revolving_door(static_cast<int>(cand.z_size()), cand.m, subsets);
    for (auto& s : subsets) std::sort(s.begin(), s.end());
    std::size_t checked = 0;
    std::optional<std::vector<std::uint32_t>> w;
    return scan_subsets(
        matcher, [&](std::size_t i) { return subsets[i]; }, subsets.size(), cap, checked, w);
}

// Annealing pass over the edge set: shrink toward `target` edges while
// keeping (or restoring) zero failing removals. Keeps the best feasible
// state seen; deterministic per seed.
Template sparsify(Template cand, std::size_t target, int iterations, std::uint64_t seed) {
    Template best = cand;
    Rng rng = Rng::stream(seed, 0xa99e);
    const std::uint32_t y0 = static_cast<std::uint32_t>(cand.y0_size());
    const std::uint32_t y1n = 3 * static_cast<std::uint32_t>(cand.m);
    std::size_t cur_fail = 0;
    double temp = 3.0;
    for (int iter = 0; iter < iterations && best.edge_count() > target; ++iter) {
        temp = std::max(0.25, temp * 0.9997);
        Template trial = cand;
        double roll = rng.uniform01();
        bool want_remove = trial.edge_count() > target ? roll < 0.65 : roll < 0.30;
        if (want_remove && trial.edge_count() > 1) {
            std::uint32_t j = static_cast<std::uint32_t>(rng.below(trial.edge_count()));
            trial.edges.erase(trial.edges.begin() + 2 * j, trial.edges.begin() + 2 * j + 2);
        } else {
            std::uint32_t a = static_cast<std::uint32_t>(rng.below(y0));
            std::uint32_t b = y0 + static_cast<std::uint32_t>(rng.below(y1n));
            bool dup = false;
            for (std::size_t j = 0; j < trial.edge_count(); ++j)
                if (trial.edges[2 * j] == a && trial.edges[2 * j + 1] == b) dup = true;
            if (dup) continue;
            if (roll >= 0.65 && trial.edge_count() > 1) {
                std::uint32_t j = static_cast<std::uint32_t>(rng.below(trial.edge_count()));
                trial.edges.erase(trial.edges.begin() + 2 * j, trial.edges.begin() + 2 * j + 2);
            }
            trial.edges.push_back(a);
            trial.edges.push_back(b);
        }
        std::size_t f = count_failures(trial, 40);
        double e_cur = static_cast<double>(cur_fail) * 40.0 + static_cast<double>(cand.edge_count());
        double e_new = static_cast<double>(f) * 40.0 + static_cast<double>(trial.edge_count());
        if (e_new <= e_cur || rng.uniform01() < std::exp((e_cur - e_new) / temp)) {
            cand = std::move(trial);
            cur_fail = f;
            if (cur_fail == 0 && cand.edge_count() < best.edge_count()) best = cand;
        }
    }
    return best;
}

// Greedy prune toward `target` edges: repeatedly drop any edge whose removal
// keeps the template flexible, thinning high-degree endpoints first.
void prune(Template& cand, bool exhaustive, const TemplateOptions& opt, std::uint64_t seed) {
    bool progress = true;
    while (cand.edge_count() > opt.prune_target && progress) {
        progress = false;
        std::vector<int> deg(cand.vertex_count(), 0);
        for (std::size_t j = 0; j < cand.edge_count(); ++j) {
            deg[cand.edge(j)[0]]++;
            deg[cand.edge(j)[1]]++;
        }
        std::vector<std::uint32_t> order(cand.edge_count());
        for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            int da = deg[cand.edge(a)[0]] + deg[cand.edge(a)[1]];
            int db = deg[cand.edge(b)[0]] + deg[cand.edge(b)[1]];
            if (da != db) return da > db;
            return a < b;
        });
        for (std::uint32_t j : order) {
            Template trial = cand;
            trial.edges.erase(trial.edges.begin() + j * 2, trial.edges.begin() + j * 2 + 2);
            if (flexible(trial, exhaustive, opt, Rng::mix(seed ^ 0x9e37 ^ j))) {
                cand = std::move(trial);
                progress = true;
                break;
            }
        }
    }
}

}  // namespace

Template build_template(int r, int m, std::uint64_t seed, const TemplateOptions& opt) {
    if (r < 2) throw std::invalid_argument("build_template: r < 2");
    if (m < 1) throw std::invalid_argument("build_template: m < 1");

    uint128 combos = binom128(2 * static_cast<unsigned>(m), static_cast<unsigned>(m));
    const bool exhaustive = combos <= opt.exhaustive_budget;

    int degree_failures = 0, flex_failures = 0;
    for (int attempt = 0; attempt < opt.retries; ++attempt) {
        Template cand = random_candidate(m, seed, attempt);
        cand.degree_cap = opt.degree_cap;
        if (cand.max_degree() > opt.degree_cap) {
            degree_failures++;
            continue;
        }
        if (!flexible(cand, exhaustive, opt, Rng::mix(seed ^ attempt))) {
            flex_failures++;
            continue;
        }
        if (opt.prune_target > 0 && cand.edge_count() > opt.prune_target)
            prune(cand, exhaustive, opt, seed);
        if (exhaustive && opt.sparsify_target > 0 && cand.edge_count() > opt.sparsify_target) {
            cand = sparsify(std::move(cand), opt.sparsify_target, opt.sparsify_iterations, seed);
            if (cand.max_degree() > opt.degree_cap) {
                degree_failures++;
                continue;
            }
        }
        return extend_template(cand, r);
    }
    throw std::runtime_error("build_template: retries exhausted (" + std::to_string(opt.retries) +
                             " attempts, " + std::to_string(degree_failures) + " degree-cap failures, " +
                             std::to_string(flex_failures) + " flexibility failures)");
}

}  // namespace hpr
