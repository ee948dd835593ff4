#include "kir/neighbours.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "kir/errors.hpp"
#include "kir/parallel.hpp"
#include "kir/rng.hpp"

namespace kir {

std::uint64_t tie_priority(std::uint64_t tie_seed, std::size_t center, std::size_t idx) {
    return rng::derive(tie_seed, static_cast<std::uint64_t>(center),
                       static_cast<std::uint64_t>(idx));
}

// Thin wrapper so the header does not need to know the RNG type.
class BuildRng {
public:
    explicit BuildRng(std::uint64_t seed) : gen_(seed) {}
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(gen_.next_below(n)); }

private:
    rng::SplitMix64 gen_;
};

VpTree::VpTree(const PointSet& points, std::uint64_t seed)
    : points_(&points), n_(points.size()) {
    if (n_ == 0) throw EmptySample("cannot build a vantage-point tree over zero points");
    nodes_.reserve(n_);
    std::vector<std::size_t> idx(n_);
    for (std::size_t i = 0; i < n_; ++i) idx[i] = i;
    BuildRng rng(seed);
    root_ = build(idx, 0, n_, rng);
}

int VpTree::build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi, BuildRng& rng) {
    if (lo >= hi) return -1;
    const int node_id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    // Seeded vantage-point choice; swap it to the front of the range.
    const std::size_t pick = lo + rng.pick(hi - lo);
    std::swap(idx[lo], idx[pick]);
    const std::size_t vp = idx[lo];
    nodes_[static_cast<std::size_t>(node_id)].vp = vp;

    if (hi - lo == 1) return node_id;

    const std::size_t mid = lo + 1 + (hi - lo - 1) / 2;
    std::nth_element(idx.begin() + static_cast<std::ptrdiff_t>(lo + 1),
                     idx.begin() + static_cast<std::ptrdiff_t>(mid),
                     idx.begin() + static_cast<std::ptrdiff_t>(hi),
                     [&](std::size_t a, std::size_t b) {
                         return points_->distance(vp, a) < points_->distance(vp, b);
                     });
    const double radius = points_->distance(vp, idx[mid]);
    nodes_[static_cast<std::size_t>(node_id)].radius = radius;

    const int left = build(idx, lo + 1, mid, rng);
    const int right = build(idx, mid, hi, rng);
    nodes_[static_cast<std::size_t>(node_id)].left = left;
    nodes_[static_cast<std::size_t>(node_id)].right = right;
    return node_id;
}

namespace {

struct Candidate {
    double dist;
    std::uint64_t priority;
    std::size_t idx;
};

// Lexicographic (distance, priority) order; the heap keeps the current
// worst candidate on top.
inline bool cand_less(const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.priority < b.priority;
}

struct HeapCmp {
    bool operator()(const Candidate& a, const Candidate& b) const { return cand_less(a, b); }
};

}  // namespace

std::vector<std::size_t> VpTree::k_nearest_excluding(std::size_t center,
                                                     const std::vector<std::size_t>& exclude,
                                                     std::size_t k,
                                                     std::uint64_t tie_seed) const {
    std::vector<std::size_t> excl(exclude);
    excl.push_back(center);
    std::sort(excl.begin(), excl.end());
    excl.erase(std::unique(excl.begin(), excl.end()), excl.end());
    std::size_t excluded_in_range = 0;
    for (std::size_t e : excl)
        if (e < n_) ++excluded_in_range;
    const std::size_t available = n_ - excluded_in_range;
    if (k > available) {
        std::ostringstream os;
        os << "requested " << k << " neighbours but only " << available
           << " candidates remain after exclusions";
        throw InsufficientPoints(os.str());
    }
    if (k == 0) return {};

    std::vector<Candidate> heap;
    heap.reserve(k + 1);
    const HeapCmp cmp{};

    const auto is_excluded = [&](std::size_t v) {
        return std::binary_search(excl.begin(), excl.end(), v);
    };

    // Recursive traversal with non-strict pruning bounds so candidates at
    // distance exactly tau stay reachable and lose only on priority.
    const auto visit = [&](const auto& self, int node_id) -> void {
        if (node_id < 0) return;
        const Node& node = nodes_[static_cast<std::size_t>(node_id)];
        const double d = points_->distance(center, node.vp);

        if (!is_excluded(node.vp)) {
            const Candidate c{d, tie_priority(tie_seed, center, node.vp), node.vp};
            if (heap.size() < k) {
                heap.push_back(c);
                std::push_heap(heap.begin(), heap.end(), cmp);
            } else if (cand_less(c, heap.front())) {
                std::pop_heap(heap.begin(), heap.end(), cmp);
                heap.back() = c;
                std::push_heap(heap.begin(), heap.end(), cmp);
            }
        }

        const auto tau = [&] {
            return heap.size() == k ? heap.front().dist
                                    : std::numeric_limits<double>::infinity();
        };
        if (d < node.radius) {
            self(self, node.left);
            if (node.radius - d <= tau()) self(self, node.right);
        } else {
            self(self, node.right);
            if (d - node.radius <= tau()) self(self, node.left);
        }
    };
    visit(visit, root_);

    std::sort(heap.begin(), heap.end(), cand_less);
    std::vector<std::size_t> out;
    out.reserve(heap.size());
    for (const Candidate& c : heap) out.push_back(c.idx);
    return out;
}

NeighbourTable build_neighbour_table(const VpTree& tree, std::size_t k, std::uint64_t tie_seed) {
    NeighbourTable table;
    table.k = k;
    table.tie_seed = tie_seed;
    table.neighbours.resize(tree.size());
    parallel_for(0, tree.size(), [&](std::size_t j) {
        table.neighbours[j] = tree.k_nearest_excluding(j, {}, k, tie_seed);
    });
    return table;
}

std::vector<std::size_t> knn_in_degrees(const NeighbourTable& table, std::size_t n) {
    std::vector<std::size_t> degrees(n, 0);
    for (const auto& list : table.neighbours)
        for (std::size_t l : list) ++degrees[l];
    return degrees;
}

InDegreeDiagnostic in_degree_diagnostic(const NeighbourTable& table, std::size_t n) {
    InDegreeDiagnostic diag;
    const auto degrees = knn_in_degrees(table, n);
    for (std::size_t d : degrees) diag.max_in_degree = std::max(diag.max_in_degree, d);
    const double k = static_cast<double>(table.k);
    diag.max_over_k = table.k == 0 ? 0.0 : static_cast<double>(diag.max_in_degree) / k;
    diag.exceeds_soft_bound = diag.max_over_k > 10.0;
    return diag;
}

}  // namespace kir
