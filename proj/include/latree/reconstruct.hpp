#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "latree/estimate.hpp"
#include "latree/tree.hpp"

namespace latree {

/// Thresholds for the grouping tests. Non-positive entries are resolved per
/// run: epsilon = half the smallest off-diagonal distance, tau = 1.2 times
/// the median off-diagonal distance.
struct RgConfig {
    double epsilon = 0;
    double tau = 0;
    int max_iterations = 64;
};

struct Provenance {
    std::string algorithm;
    double epsilon = 0;
    double tau = 0;
    int iterations = 0;
    bool failed = false;
    std::vector<std::string> notes;
};

/// Reconstruction output: observed ids are the input labels, hidden ids are
/// freshly allocated above them. `distances` holds every pair distance the
/// learner touched or introduced.
struct LearnedTree {
    LatentTree tree;
    std::vector<int> observed_labels;
    std::map<std::pair<int, int>, double> distances;
    Provenance provenance;
};

namespace detail {

inline std::uint64_t pair_key(int i, int j) {
    if (i > j) std::swap(i, j);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
           static_cast<std::uint32_t>(j);
}

struct DistStore {
    std::unordered_map<std::uint64_t, double> d;
    std::unordered_set<std::uint64_t> sat;

    bool has(int i, int j) const { return i == j || d.count(pair_key(i, j)) > 0; }

    double get(int i, int j) const {
        if (i == j) return 0.0;
        auto it = d.find(pair_key(i, j));
        if (it == d.end())
            throw std::runtime_error("missing distance between " + std::to_string(i) + " and " +
                                     std::to_string(j));
        return it->second;
    }

    bool usable(int i, int j) const {
        return i == j || (d.count(pair_key(i, j)) > 0 && sat.count(pair_key(i, j)) == 0);
    }

    void set(int i, int j, double v, bool saturated = false) {
        d[pair_key(i, j)] = v;
        if (saturated)
            sat.insert(pair_key(i, j));
        else
            sat.erase(pair_key(i, j));
    }

    void fill_from(const DistanceMatrix& m) {
        for (int i = 0; i < m.size(); ++i)
            for (int j = i + 1; j < m.size(); ++j)
                set(m.labels[i], m.labels[j], m.values(i, j));
        for (auto [a, b] : m.saturated) {
            const int la = m.labels[a], lb = m.labels[b];
            set(la, lb, m.values(a, b), true);
        }
    }
};

struct RgOutcome {
    std::vector<std::pair<int, int>> edges;
    std::vector<int> hidden_created;
    int iterations = 0;
    bool failed = false;
    std::vector<std::string> notes;
};

/// One recursive-grouping pass over an active set. Shared by the standalone
/// learner and the per-neighborhood calls of the Chow-Liu variant; the
/// distance store and the node registry are owned by the caller so that
/// estimated hidden-node distances survive across calls.
class RgEngine {
public:
    RgEngine(DistStore& store, std::vector<int>& all_nodes, int& next_id, double epsilon,
             double tau, double d_cap, int max_iterations)
        : store_(store),
          all_nodes_(all_nodes),
          next_id_(next_id),
          eps_(epsilon),
          tau_(tau),
          d_cap_(d_cap),
          max_iterations_(max_iterations) {}

    RgOutcome run(std::vector<int> active) {
        RgOutcome out;
        std::sort(active.begin(), active.end());
        while (static_cast<int>(active.size()) > 2) {
            if (out.iterations >= max_iterations_) {
                out.failed = true;
                out.notes.push_back("iteration cap reached with " +
                                    std::to_string(active.size()) + " active nodes");
                break;
            }
            ++out.iterations;
            if (!step(active, out)) {
                out.failed = true;
                out.notes.push_back("no relation identified among " +
                                    std::to_string(active.size()) + " active nodes");
                break;
            }
        }
        finalize(active, out);
        return out;
    }

private:
    DistStore& store_;
    std::vector<int>& all_nodes_;
    int& next_id_;
    double eps_, tau_, d_cap_;
    int max_iterations_;

    // classify all pairs, absorb children, group sibling families; returns
    // false when the active set did not change
    bool step(std::vector<int>& active, RgOutcome& out) {
        const int m = static_cast<int>(active.size());
        std::vector<std::pair<int, int>> parent_verdicts;  // (child, parent)
        std::vector<std::pair<int, int>> sibling_edges;
        for (int a = 0; a < m; ++a) {
            for (int b = a + 1; b < m; ++b) {
                const int i = active[a], j = active[b];
                if (!store_.usable(i, j)) continue;
                const double dij = store_.get(i, j);
                double mn = std::numeric_limits<double>::infinity();
                double mx = -std::numeric_limits<double>::infinity();
                bool any = false, j_parent_of_i = true, i_parent_of_j = true;
                for (int c = 0; c < m; ++c) {
                    const int k = active[c];
                    if (k == i || k == j) continue;
                    if (!store_.usable(i, k) || !store_.usable(j, k)) continue;
                    const double ph = store_.get(i, k) - store_.get(j, k);
                    any = true;
                    mn = std::min(mn, ph);
                    mx = std::max(mx, ph);
                    if (std::abs(ph - dij) >= eps_) j_parent_of_i = false;
                    if (std::abs(ph + dij) >= eps_) i_parent_of_j = false;
                }
                if (!any) continue;
                if (mx - mn >= eps_) continue;  // the pair relates through distinct branches
                if (j_parent_of_i && i_parent_of_j) {
                    out.notes.push_back("ambiguous parent direction for (" + std::to_string(i) +
                                        "," + std::to_string(j) + ")");
                    i_parent_of_j = false;
                }
                if (j_parent_of_i)
                    parent_verdicts.emplace_back(i, j);
                else if (i_parent_of_j)
                    parent_verdicts.emplace_back(j, i);
                else
                    sibling_edges.emplace_back(i, j);
            }
        }

        // children absorbed by their parents first, deterministically
        std::sort(parent_verdicts.begin(), parent_verdicts.end());
        std::set<int> absorbed;
        for (auto [child, parent] : parent_verdicts) {
            if (absorbed.count(child) || absorbed.count(parent)) {
                out.notes.push_back("dropped parent verdict " + std::to_string(parent) + "<-" +
                                    std::to_string(child));
                continue;
            }
            absorbed.insert(child);
            out.edges.emplace_back(child, parent);
        }

        // sibling components among the survivors become families
        std::map<int, int> comp;
        for (int id : active)
            if (!absorbed.count(id)) comp[id] = id;
        std::function<int(int)> find = [&](int x) {
            while (comp[x] != x) x = comp[x] = comp[comp[x]];
            return x;
        };
        for (auto [a, b] : sibling_edges) {
            if (absorbed.count(a) || absorbed.count(b)) continue;
            const int ra = find(a), rb = find(b);
            if (ra != rb) comp[std::max(ra, rb)] = std::min(ra, rb);
        }
        std::map<int, std::vector<int>> families;
        for (auto& [id, _] : comp) families[find(id)].push_back(id);

        std::vector<int> next_active;
        bool changed = !absorbed.empty();
        for (auto& [root, members] : families) {
            if (members.size() < 2) {
                next_active.push_back(members.front());
                continue;
            }
            const int h = make_family(members, active, out);
            next_active.push_back(h);
            changed = true;
        }
        if (!changed) return false;
        std::sort(next_active.begin(), next_active.end());
        active = std::move(next_active);
        return true;
    }

    // introduces a hidden parent over `family`, estimating its distance to
    // each child and then to every other known node
    int make_family(const std::vector<int>& family, const std::vector<int>& active,
                    RgOutcome& out) {
        const int h = next_id_++;
        for (int s : family) {
            // average of d(s,j) + mean_k Phi_sjk over co-children j, with k
            // restricted to nearby active nodes
            double sum = 0;
            int terms = 0;
            for (int j : family) {
                if (j == s || !store_.usable(s, j)) continue;
                double phi_sum = 0;
                int phi_n = 0;
                for (int pass = 0; pass < 2 && phi_n == 0; ++pass) {
                    for (int k : active) {
                        if (k == s || k == j) continue;
                        if (!store_.usable(s, k) || !store_.usable(j, k)) continue;
                        if (pass == 0 && std::max(store_.get(s, k), store_.get(j, k)) >= tau_)
                            continue;
                        phi_sum += store_.get(s, k) - store_.get(j, k);
                        ++phi_n;
                    }
                }
                if (phi_n == 0) continue;
                sum += store_.get(s, j) + phi_sum / phi_n;
                ++terms;
            }
            if (terms == 0) {
                store_.set(s, h, d_cap_, true);
                out.notes.push_back("saturated child distance " + std::to_string(s) + "-" +
                                    std::to_string(h));
            } else {
                store_.set(s, h, std::max(0.0, sum / (2.0 * terms)));
            }
            out.edges.emplace_back(s, h);
        }
        // distance from h to every other node: each child k with the new
        // parent on its path to z testifies d(k,z) - d(k,h); the consistent
        // (largest) cohort is averaged, which discards children that reach z
        // without passing through h
        std::set<int> fam(family.begin(), family.end());
        for (int z : all_nodes_) {
            if (fam.count(z) || z == h) continue;
            double best = -std::numeric_limits<double>::infinity();
            std::vector<double> vals;
            for (int k : family) {
                if (!store_.usable(k, z) || !store_.usable(k, h)) continue;
                vals.push_back(store_.get(k, z) - store_.get(k, h));
                best = std::max(best, vals.back());
            }
            if (vals.empty()) {
                store_.set(z, h, d_cap_, true);
                continue;
            }
            double sum = 0;
            int cnt = 0;
            for (double v : vals)
                if (v >= best - eps_) {
                    sum += v;
                    ++cnt;
                }
            store_.set(z, h, std::max(0.0, sum / cnt));
        }
        all_nodes_.push_back(h);
        out.hidden_created.push_back(h);
        return h;
    }

    void finalize(std::vector<int>& active, RgOutcome& out) {
        if (active.size() == 2) {
            out.edges.emplace_back(active[0], active[1]);
        } else if (active.size() > 2) {
            // bail-out join so the output stays a tree
            std::vector<int> snapshot(active);
            const int h = make_family(snapshot, snapshot, out);
            out.notes.push_back("joined " + std::to_string(snapshot.size()) +
                                " unresolved nodes under " + std::to_string(h));
        }
    }
};

inline std::pair<double, double> resolve_thresholds(const DistanceMatrix& D,
                                                    const RgConfig& cfg) {
    double eps = cfg.epsilon, tau = cfg.tau;
    if (eps <= 0 || tau <= 0) {
        std::vector<double> off;
        for (int i = 0; i < D.size(); ++i)
            for (int j = i + 1; j < D.size(); ++j) off.push_back(D.values(i, j));
        if (off.empty()) throw std::invalid_argument("distance matrix has no off-diagonal entries");
        std::sort(off.begin(), off.end());
        if (eps <= 0) eps = 0.5 * off.front();
        if (tau <= 0) tau = 1.2 * off[off.size() / 2];
    }
    return {eps, tau};
}

inline LearnedTree assemble_learned_tree(const std::vector<int>& labels,
                                         const std::vector<std::pair<int, int>>& edges,
                                         const DistStore& store, Provenance prov) {
    LearnedTree lt;
    lt.observed_labels = labels;
    std::set<int> label_set(labels.begin(), labels.end());
    std::set<int> nodes;
    for (auto [a, b] : edges) {
        nodes.insert(a);
        nodes.insert(b);
    }
    for (int l : labels) nodes.insert(l);
    for (int id : nodes) {
        lt.tree.ids.push_back(id);
        lt.tree.kinds.push_back(label_set.count(id) ? NodeKind::observed : NodeKind::hidden);
    }
    lt.tree.edges = edges;
    for (const auto& [key, v] : store.d) {
        const int i = static_cast<int>(key >> 32);
        const int j = static_cast<int>(key & 0xFFFFFFFFu);
        if (nodes.count(i) && nodes.count(j)) lt.distances[{i, j}] = v;
    }
    // the RG family guarantees hidden degree >= 3; audit rather than fix
    for (size_t i = 0; i < lt.tree.ids.size(); ++i)
        if (lt.tree.kinds[i] == NodeKind::hidden && lt.tree.degree(lt.tree.ids[i]) < 3)
            prov.notes.push_back("hidden node " + std::to_string(lt.tree.ids[i]) +
                                 " has degree " + std::to_string(lt.tree.degree(lt.tree.ids[i])));
    lt.provenance = std::move(prov);
    return lt;
}

}  // namespace detail

/// Recursive grouping over estimated information distances.
inline LearnedTree rg_learn(const DistanceMatrix& D, const RgConfig& cfg = {}) {
    if (D.size() < 3) throw std::invalid_argument("rg_learn requires at least 3 nodes");
    auto [eps, tau] = detail::resolve_thresholds(D, cfg);
    detail::DistStore store;
    store.fill_from(D);
    std::vector<int> all_nodes = D.labels;
    int next_id = *std::max_element(D.labels.begin(), D.labels.end()) + 1;
    const double d_cap = std::max(50.0, D.values.maxCoeff());
    detail::RgEngine engine(store, all_nodes, next_id, eps, tau, d_cap, cfg.max_iterations);
    auto out = engine.run(D.labels);
    Provenance prov;
    prov.algorithm = "rg";
    prov.epsilon = eps;
    prov.tau = tau;
    prov.iterations = out.iterations;
    prov.failed = out.failed;
    prov.notes = out.notes;
    return detail::assemble_learned_tree(D.labels, out.edges, store, std::move(prov));
}

/// Classical neighbor joining; returns an unrooted tree whose hidden
/// internal nodes all have degree three.
inline LearnedTree nj_learn(const DistanceMatrix& D) {
    if (D.size() < 3) throw std::invalid_argument("nj_learn requires at least 3 nodes");
    detail::DistStore store;
    store.fill_from(D);
    std::vector<int> active = D.labels;
    std::sort(active.begin(), active.end());
    int next_id = active.back() + 1;
    std::vector<std::pair<int, int>> edges;
    while (active.size() > 3) {
        const int r = static_cast<int>(active.size());
        std::map<int, double> rowsum;
        for (int i : active) {
            double s = 0;
            for (int k : active)
                if (k != i) s += store.get(i, k);
            rowsum[i] = s;
        }
        double best_q = std::numeric_limits<double>::infinity();
        int bi = -1, bj = -1;
        for (size_t a = 0; a < active.size(); ++a)
            for (size_t b = a + 1; b < active.size(); ++b) {
                const int i = active[a], j = active[b];
                const double q = (r - 2) * store.get(i, j) - rowsum[i] - rowsum[j];
                if (q < best_q) {
                    best_q = q;
                    bi = i;
                    bj = j;
                }
            }
        const int u = next_id++;
        const double dij = store.get(bi, bj);
        double limb_i = 0.5 * dij + (rowsum[bi] - rowsum[bj]) / (2.0 * (r - 2));
        limb_i = std::clamp(limb_i, 0.0, dij);
        store.set(bi, u, limb_i);
        store.set(bj, u, dij - limb_i);
        for (int k : active) {
            if (k == bi || k == bj) continue;
            store.set(u, k, std::max(0.0, 0.5 * (store.get(bi, k) + store.get(bj, k) - dij)));
        }
        edges.emplace_back(bi, u);
        edges.emplace_back(bj, u);
        active.erase(std::remove(active.begin(), active.end(), bi), active.end());
        active.erase(std::remove(active.begin(), active.end(), bj), active.end());
        active.push_back(u);
    }
    const int u = next_id++;
    const int a = active[0], b = active[1], c = active[2];
    store.set(a, u, std::max(0.0, 0.5 * (store.get(a, b) + store.get(a, c) - store.get(b, c))));
    store.set(b, u, std::max(0.0, 0.5 * (store.get(a, b) + store.get(b, c) - store.get(a, c))));
    store.set(c, u, std::max(0.0, 0.5 * (store.get(a, c) + store.get(b, c) - store.get(a, b))));
    edges.emplace_back(a, u);
    edges.emplace_back(b, u);
    edges.emplace_back(c, u);
    Provenance prov;
    prov.algorithm = "nj";
    prov.iterations = static_cast<int>(D.size()) - 3;
    return detail::assemble_learned_tree(D.labels, edges, store, std::move(prov));
}

namespace detail {

/// sigma_2 of the affinity block with rows in `members` and columns on the
/// complement; zero for a true clan of a binary latent tree.
inline double clan_second_singular_value(const Eigen::MatrixXd& R, const std::vector<int>& members) {
    const int n = static_cast<int>(R.rows());
    std::vector<char> in(n, 0);
    for (int m : members) in[m] = 1;
    std::vector<int> comp;
    for (int i = 0; i < n; ++i)
        if (!in[i]) comp.push_back(i);
    Eigen::MatrixXd block(members.size(), comp.size());
    for (size_t r = 0; r < members.size(); ++r)
        for (size_t c = 0; c < comp.size(); ++c) block(r, c) = R(members[r], comp[c]);
    if (block.rows() < 2 || block.cols() < 2) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
    return svd.singularValues()(1);
}

}  // namespace detail

/// Spectral neighbor joining on a precomputed affinity matrix (indexed like
/// `labels`). Merges the cluster pair whose union block is closest to rank
/// one; the final three clusters join at one hidden node.
inline LearnedTree snj_from_affinity(const Eigen::MatrixXd& R, const std::vector<int>& labels) {
    const int n = static_cast<int>(labels.size());
    if (n < 3) throw std::invalid_argument("snj requires at least 3 nodes");
    struct Cluster {
        std::vector<int> members;  // positions into labels
        int root;                  // tree node id
    };
    std::vector<Cluster> clusters;
    for (int i = 0; i < n; ++i) clusters.push_back({{i}, labels[i]});
    std::sort(clusters.begin(), clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.members[0] < b.members[0]; });
    int next_id = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::pair<int, int>> edges;
    Provenance prov;
    prov.algorithm = "snj";
    while (clusters.size() > 3) {
        double best = std::numeric_limits<double>::infinity();
        size_t bi = 0, bj = 1;
        for (size_t i = 0; i < clusters.size(); ++i)
            for (size_t j = i + 1; j < clusters.size(); ++j) {
                std::vector<int> uni = clusters[i].members;
                uni.insert(uni.end(), clusters[j].members.begin(), clusters[j].members.end());
                const double s = detail::clan_second_singular_value(R, uni);
                if (s < best) {
                    best = s;
                    bi = i;
                    bj = j;
                }
            }
        const int h = next_id++;
        edges.emplace_back(clusters[bi].root, h);
        edges.emplace_back(clusters[bj].root, h);
        prov.notes.push_back("merged clusters at " + std::to_string(clusters[bi].root) + "," +
                             std::to_string(clusters[bj].root) + " score " + std::to_string(best));
        clusters[bi].members.insert(clusters[bi].members.end(), clusters[bj].members.begin(),
                                    clusters[bj].members.end());
        std::sort(clusters[bi].members.begin(), clusters[bi].members.end());
        clusters[bi].root = h;
        clusters.erase(clusters.begin() + bj);
        std::sort(clusters.begin(), clusters.end(),
                  [](const Cluster& a, const Cluster& b) { return a.members[0] < b.members[0]; });
        ++prov.iterations;
    }
    const int h = next_id++;
    for (const auto& c : clusters) edges.emplace_back(c.root, h);
    detail::DistStore empty_store;
    return detail::assemble_learned_tree(labels, edges, empty_store, std::move(prov));
}

inline LearnedTree snj_learn(const DistanceMatrix& D) {
    Eigen::MatrixXd R = (-D.values).array().exp();
    return snj_from_affinity(R, D.labels);
}

/// Minimum spanning tree with lexicographic tie-breaking on (weight, i, j).
inline LatentTree mst(const DistanceMatrix& D) {
    if (D.size() < 1) throw std::invalid_argument("mst requires at least 1 node");
    struct E {
        double w;
        int a, b;
    };
    std::vector<E> es;
    for (int i = 0; i < D.size(); ++i)
        for (int j = i + 1; j < D.size(); ++j)
            es.push_back({D.values(i, j), std::min(D.labels[i], D.labels[j]),
                          std::max(D.labels[i], D.labels[j])});
    std::sort(es.begin(), es.end(), [](const E& x, const E& y) {
        if (x.w != y.w) return x.w < y.w;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    std::map<int, int> parent;
    for (int l : D.labels) parent[l] = l;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    LatentTree t;
    t.ids = D.labels;
    std::sort(t.ids.begin(), t.ids.end());
    t.kinds.assign(t.ids.size(), NodeKind::observed);
    for (const auto& e : es) {
        const int ra = find(e.a), rb = find(e.b);
        if (ra == rb) continue;
        parent[std::max(ra, rb)] = std::min(ra, rb);
        t.edges.emplace_back(e.a, e.b);
        if (static_cast<int>(t.edges.size()) == D.size() - 1) break;
    }
    return t;
}

/// Chow-Liu initialization followed by recursive grouping on each internal
/// neighborhood of the spanning tree, splicing the local result in place.
inline LearnedTree clrg_learn(const DistanceMatrix& D, const RgConfig& cfg = {}) {
    if (D.size() < 3) throw std::invalid_argument("clrg_learn requires at least 3 nodes");
    auto [eps, tau] = detail::resolve_thresholds(D, cfg);
    const LatentTree cl = mst(D);
    detail::DistStore store;
    store.fill_from(D);
    std::vector<int> all_nodes = D.labels;
    int next_id = *std::max_element(D.labels.begin(), D.labels.end()) + 1;
    const double d_cap = std::max(50.0, D.values.maxCoeff());

    std::map<int, std::set<int>> adj;
    for (int l : D.labels) adj[l];
    for (auto [a, b] : cl.edges) {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    std::vector<int> internal;
    for (int l : D.labels)
        if (adj[l].size() >= 2) internal.push_back(l);
    std::sort(internal.begin(), internal.end());

    Provenance prov;
    prov.algorithm = "clrg";
    prov.epsilon = eps;
    prov.tau = tau;
    for (int x : internal) {
        std::vector<int> local(adj[x].begin(), adj[x].end());
        local.push_back(x);
        if (local.size() < 3) {
            prov.notes.push_back("neighborhood of " + std::to_string(x) + " too small, kept");
            continue;
        }
        detail::RgEngine engine(store, all_nodes, next_id, eps, tau, d_cap, cfg.max_iterations);
        auto out = engine.run(local);
        prov.iterations = std::max(prov.iterations, out.iterations);
        for (auto& n : out.notes) prov.notes.push_back("nbd " + std::to_string(x) + ": " + n);
        if (out.failed) {
            prov.notes.push_back("neighborhood of " + std::to_string(x) +
                                 " failed, original star kept");
            continue;
        }
        std::vector<int> nb(adj[x].begin(), adj[x].end());
        for (int b : nb) {
            adj[x].erase(b);
            adj[b].erase(x);
        }
        for (auto [a, b] : out.edges) {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }

    std::vector<std::pair<int, int>> edges;
    for (auto& [a, nbrs] : adj)
        for (int b : nbrs)
            if (a < b) edges.emplace_back(a, b);
    return detail::assemble_learned_tree(D.labels, edges, store, std::move(prov));
}

/// Newick export for trees whose observed nodes are all leaves; internal
/// nodes stay unnamed, branch lengths come from the augmented distances.
inline std::string to_newick(const LearnedTree& lt) {
    const LatentTree& t = lt.tree;
    for (size_t i = 0; i < t.ids.size(); ++i)
        if (t.kinds[i] == NodeKind::observed && t.degree(t.ids[i]) != 1)
            throw std::invalid_argument("newick export requires observed nodes to be leaves");
    int root = -1;
    for (size_t i = 0; i < t.ids.size(); ++i)
        if (t.kinds[i] == NodeKind::hidden) root = std::max(root, t.ids[i]);
    if (root == -1) throw std::invalid_argument("newick export requires a hidden internal node");
    std::map<int, std::vector<int>> adj;
    for (auto [a, b] : t.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& [k, v] : adj) std::sort(v.begin(), v.end());
    auto branch = [&](int a, int b) -> std::string {
        auto it = lt.distances.find({std::min(a, b), std::max(a, b)});
        if (it == lt.distances.end()) return "";
        std::ostringstream os;
        os << ":" << it->second;
        return os.str();
    };
    std::function<std::string(int, int)> emit = [&](int node, int from) -> std::string {
        std::vector<std::string> parts;
        for (int nb : adj[node])
            if (nb != from) parts.push_back(emit(nb, node) + branch(node, nb));
        if (parts.empty()) return std::to_string(node);
        std::string s = "(";
        for (size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i];
        s += ")";
        if (t.kind_of(node) == NodeKind::observed) s += std::to_string(node);
        return s;
    };
    return emit(root, -1) + ";";
}

}  // namespace latree
