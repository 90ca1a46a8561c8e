#include "mqc/partitions.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>

#include "mqc/errors.hpp"

namespace mqc {

int popcount(Mask m) { return std::popcount(m); }

std::vector<int> mask_members(Mask m) {
    std::vector<int> out;
    for (int i = 0; m != 0; ++i, m >>= 1)
        if (m & 1U) out.push_back(i);
    return out;
}

namespace {

Mask lowest_bit(Mask m) { return m & (~m + 1U); }

void check_n(int n) {
    if (n < 1 || n > kMaxParties) throw InvalidArgument("number of parties must be in [1, 9]");
}

Mask full_mask(int n) { return n >= 32 ? ~Mask{0} : ((Mask{1} << n) - 1U); }

}  // namespace

SubRepartition::SubRepartition(int n, std::vector<Mask> blocks) : n_(n), blocks_(std::move(blocks)) {
    check_n(n);
    if (blocks_.empty()) throw InvalidArgument("sub-repartition needs at least one block");
    Mask seen = 0;
    for (Mask b : blocks_) {
        if (b == 0) throw InvalidArgument("empty block in sub-repartition");
        if (b & ~full_mask(n)) throw InvalidArgument("block member outside {1..n}");
        if (b & seen) throw InvalidArgument("blocks of a sub-repartition must be disjoint");
        seen |= b;
    }
    std::sort(blocks_.begin(), blocks_.end(), [](Mask x, Mask y) { return lowest_bit(x) < lowest_bit(y); });
}

SubRepartition SubRepartition::from_blocks(int n, const std::vector<std::vector<int>>& blocks) {
    std::vector<Mask> masks;
    for (const auto& b : blocks) {
        Mask m = 0;
        for (int i : b) {
            if (i < 0 || i >= n) throw InvalidArgument("block member outside {1..n}");
            if (m & (Mask{1} << i)) throw InvalidArgument("repeated member inside a block");
            m |= Mask{1} << i;
        }
        masks.push_back(m);
    }
    return SubRepartition(n, std::move(masks));
}

SubRepartition SubRepartition::singletons(int n, Mask support) {
    std::vector<Mask> masks;
    for (int i : mask_members(support)) masks.push_back(Mask{1} << i);
    return SubRepartition(n, std::move(masks));
}

Mask SubRepartition::support() const {
    Mask s = 0;
    for (Mask b : blocks_) s |= b;
    return s;
}

std::size_t SubRepartition::depth() const {
    std::size_t d = 0;
    for (Mask b : blocks_) d = std::max<std::size_t>(d, std::popcount(b));
    return d;
}

std::vector<std::vector<int>> SubRepartition::blocks() const {
    std::vector<std::vector<int>> out;
    for (Mask b : blocks_) out.push_back(mask_members(b));
    return out;
}

std::string SubRepartition::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        if (i) os << '|';
        auto members = mask_members(blocks_[i]);
        for (std::size_t j = 0; j < members.size(); ++j) {
            if (j) os << ',';
            os << members[j] + 1;
        }
    }
    return os.str();
}

SubRepartition parse_partition(const std::string& text, int n) {
    if (n < 1 || n > kMaxParties) throw InvalidArgument("number of parties must be in [1, 9]");
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw ParseError("empty partition string");
    std::vector<Mask> masks;
    std::stringstream blocks(s);
    std::string block;
    std::size_t pipes = static_cast<std::size_t>(std::count(s.begin(), s.end(), '|'));
    while (std::getline(blocks, block, '|')) {
        if (block.empty()) throw ParseError("empty block in partition string: " + text);
        Mask m = 0;
        std::stringstream items(block);
        std::string item;
        std::size_t commas = static_cast<std::size_t>(std::count(block.begin(), block.end(), ','));
        std::size_t count = 0;
        while (std::getline(items, item, ',')) {
            ++count;
            if (item.empty() || !std::all_of(item.begin(), item.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
                throw ParseError("malformed label '" + item + "' in partition string: " + text);
            int label = std::stoi(item);
            if (label < 1 || label > n) throw ParseError("label out of range in partition string: " + text);
            Mask bit = Mask{1} << (label - 1);
            if (m & bit) throw ParseError("repeated label in partition string: " + text);
            m |= bit;
        }
        if (count != commas + 1) throw ParseError("dangling comma in partition string: " + text);
        masks.push_back(m);
    }
    if (masks.size() != pipes + 1) throw ParseError("dangling bar in partition string: " + text);
    try {
        return SubRepartition(n, std::move(masks));
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string(e.what()) + ": " + text);
    }
}

namespace {

void partitions_rec(Mask rest, std::vector<Mask>& cur, std::vector<std::vector<Mask>>& out) {
    if (rest == 0) {
        out.push_back(cur);
        return;
    }
    const Mask first = lowest_bit(rest);
    const Mask others = rest & ~first;
    // Every subset of `others` joins `first`.
    Mask sub = others;
    while (true) {
        cur.push_back(first | sub);
        partitions_rec(others & ~sub, cur, out);
        cur.pop_back();
        if (sub == 0) break;
        sub = (sub - 1) & others;
    }
}

}  // namespace

std::vector<SubRepartition> set_partitions_of(int n, Mask support) {
    check_n(n);
    if (support == 0) throw InvalidArgument("empty support");
    std::vector<std::vector<Mask>> raw;
    std::vector<Mask> cur;
    partitions_rec(support, cur, raw);
    std::vector<SubRepartition> out;
    out.reserve(raw.size());
    for (auto& r : raw) out.emplace_back(n, std::move(r));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<SubRepartition> enumerate_subrepartitions(int n) {
    check_n(n);
    std::vector<SubRepartition> out;
    for (Mask s = 1; s <= full_mask(n); ++s) {
        auto part = set_partitions_of(n, s);
        out.insert(out.end(), part.begin(), part.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

char to_char(Coarsening t) {
    switch (t) {
        case Coarsening::a: return 'a';
        case Coarsening::b: return 'b';
        case Coarsening::c: return 'c';
    }
    return '?';
}

bool coarser_basic(const SubRepartition& q, const SubRepartition& p, Coarsening t) {
    if (q.n() != p.n()) throw InvalidArgument("sub-repartitions over different party counts");
    switch (t) {
        case Coarsening::a:
            for (Mask b : q.masks())
                if (std::find(p.masks().begin(), p.masks().end(), b) == p.masks().end()) return false;
            return true;
        case Coarsening::b:
            for (Mask b : q.masks()) {
                Mask covered = 0;
                for (Mask pb : p.masks()) {
                    if ((pb & b) == pb) covered |= pb;
                    else if (pb & b) return false;
                }
                if (covered != b) return false;
            }
            return true;
        case Coarsening::c: {
            if (q.size() != p.size()) return false;
            Mask used = 0;  // indices of P blocks already assigned
            for (Mask b : q.masks()) {
                bool found = false;
                for (std::size_t j = 0; j < p.size(); ++j) {
                    if ((p.block(j) & b) == b) {
                        if (used & (Mask{1} << j)) return false;
                        used |= Mask{1} << j;
                        found = true;
                        break;
                    }
                }
                if (!found) return false;
            }
            return true;
        }
    }
    return false;
}

namespace {

// Reachability in a finite graph whose edges are given by a predicate,
// computed by breadth-first search and cached per source node.
template <class Node>
class LazyClosure {
public:
    LazyClosure(std::vector<Node> nodes, std::function<bool(const Node&, const Node&)> step)
        : nodes_(std::move(nodes)), step_(std::move(step)) {
        for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i], i);
    }

    // True when `lower` is reachable from `upper`.
    bool related(const Node& lower, const Node& upper) {
        auto iu = index_.find(upper);
        auto il = index_.find(lower);
        if (iu == index_.end() || il == index_.end()) throw InvalidArgument("node outside the enumerated family");
        std::lock_guard<std::mutex> lock(mu_);
        auto it = reach_.find(iu->second);
        if (it == reach_.end()) it = reach_.emplace(iu->second, bfs(iu->second)).first;
        return it->second[il->second] != 0;
    }

private:
    std::vector<char> bfs(std::size_t src) const {
        std::vector<char> seen(nodes_.size(), 0);
        std::vector<std::size_t> frontier{src};
        seen[src] = 1;
        while (!frontier.empty()) {
            std::size_t x = frontier.back();
            frontier.pop_back();
            for (std::size_t y = 0; y < nodes_.size(); ++y) {
                if (seen[y]) continue;
                if (step_(nodes_[y], nodes_[x])) {
                    seen[y] = 1;
                    frontier.push_back(y);
                }
            }
        }
        return seen;
    }

    std::vector<Node> nodes_;
    std::function<bool(const Node&, const Node&)> step_;
    std::map<Node, std::size_t> index_;
    std::map<std::size_t, std::vector<char>> reach_;
    std::mutex mu_;
};

template <class Key, class Node>
LazyClosure<Node>& closure_for(std::map<Key, std::unique_ptr<LazyClosure<Node>>>& registry, std::mutex& mu,
                               const Key& key, const std::function<std::unique_ptr<LazyClosure<Node>>()>& make) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = registry.find(key);
    if (it == registry.end()) it = registry.emplace(key, make()).first;
    return *it->second;
}

bool any_basic(const SubRepartition& q, const SubRepartition& p) {
    return coarser_basic(q, p, Coarsening::a) || coarser_basic(q, p, Coarsening::b) ||
           coarser_basic(q, p, Coarsening::c);
}

}  // namespace

bool coarser(const SubRepartition& q, const SubRepartition& p) {
    if (q.n() != p.n()) throw InvalidArgument("sub-repartitions over different party counts");
    const int n = p.n();
    if (n > kMaxClosureParties) throw UnsupportedError("closure of the coarsening relation is limited to n <= 7");
    static std::map<int, std::unique_ptr<LazyClosure<SubRepartition>>> registry;
    static std::mutex mu;
    auto& c = closure_for<int, SubRepartition>(registry, mu, n, [n] {
        return std::make_unique<LazyClosure<SubRepartition>>(enumerate_subrepartitions(n), any_basic);
    });
    return c.related(q, p);
}

namespace {

// Set partitions of the index set {0..m-1} filtered by a predicate on the
// group sizes, mapped onto unions of P's blocks.
std::vector<SubRepartition> grouped(const SubRepartition& p, const std::function<bool(const std::vector<Mask>&)>& keep) {
    const std::size_t m = p.size();
    if (m > 31) throw InvalidArgument("too many blocks");
    std::vector<std::vector<Mask>> raw;
    std::vector<Mask> cur;
    partitions_rec(full_mask(static_cast<int>(m)), cur, raw);
    std::vector<SubRepartition> out;
    for (const auto& groups : raw) {
        if (!keep(groups)) continue;
        std::vector<Mask> blocks;
        for (Mask g : groups) {
            Mask u = 0;
            for (int i : mask_members(g)) u |= p.block(static_cast<std::size_t>(i));
            blocks.push_back(u);
        }
        out.emplace_back(p.n(), std::move(blocks));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<SubRepartition> bounded_coarsenings(const SubRepartition& p, std::size_t k) {
    if (k < 1) throw InvalidArgument("bounded_coarsenings needs k >= 1");
    return grouped(p, [k](const std::vector<Mask>& g) {
        return std::all_of(g.begin(), g.end(), [k](Mask x) { return static_cast<std::size_t>(std::popcount(x)) <= k; });
    });
}

std::vector<SubRepartition> block_groupings(const SubRepartition& p, std::size_t k) {
    return grouped(p, [k](const std::vector<Mask>& g) { return g.size() == k; });
}

namespace {

void check_tagged(const TaggedPartition& x) {
    if (x.k < 2 || static_cast<std::size_t>(x.k) > x.p.size())
        throw InvalidArgument("tagged partition needs 2 <= k <= number of blocks");
}

std::vector<TaggedPartition> tagged_nodes(int n) {
    std::vector<TaggedPartition> out;
    for (const auto& r : enumerate_subrepartitions(n))
        for (int k = 2; static_cast<std::size_t>(k) <= r.size(); ++k) out.push_back({k, r});
    return out;
}

}  // namespace

bool ke_basic(const TaggedPartition& q, const TaggedPartition& p, Coarsening t) {
    check_tagged(q);
    check_tagged(p);
    const int k1 = q.k, k2 = p.k;
    const int r = static_cast<int>(q.p.size()), m = static_cast<int>(p.p.size());
    if (t == Coarsening::c) return r == m && 2 <= k1 && k1 <= k2 && k2 <= m && coarser_basic(q.p, p.p, t);
    if (!(2 <= k1 && k1 <= k2 && k2 <= m && k1 <= r)) return false;
    if (!coarser_basic(q.p, p.p, t)) return false;
    for (const auto& grouping : block_groupings(p.p, static_cast<std::size_t>(k2))) {
        int count = 0;
        for (Mask rj : grouping.masks())
            if (std::any_of(q.p.masks().begin(), q.p.masks().end(), [rj](Mask qi) { return (rj & qi) == qi; })) ++count;
        if (count < k1) return false;
    }
    return true;
}

bool kpe_basic(const TaggedPartition& q, const TaggedPartition& p, Coarsening t) {
    check_tagged(q);
    check_tagged(p);
    const int k1 = q.k, k2 = p.k;
    const int r = static_cast<int>(q.p.size()), m = static_cast<int>(p.p.size());
    if (t == Coarsening::c) return r == m && 2 <= k2 && k2 <= k1 && k1 <= m && coarser_basic(q.p, p.p, t);
    if (!(2 <= k2 && k2 <= k1 && k1 <= r && k2 <= m)) return false;
    if (!coarser_basic(q.p, p.p, t)) return false;
    if (t == Coarsening::a) return true;
    for (const auto& rr : bounded_coarsenings(p.p, static_cast<std::size_t>(k2 - 1))) {
        for (Mask qi : q.p.masks()) {
            Mask u = 0;
            for (Mask rj : rr.masks())
                if (rj & qi) u |= rj;
            int touched = 0;
            for (Mask qs : q.p.masks())
                if (qs & u) ++touched;
            if (touched > k1 - 1) return false;
        }
    }
    return true;
}

namespace {

bool tagged_closure(const TaggedPartition& q, const TaggedPartition& p,
                    bool (*basic)(const TaggedPartition&, const TaggedPartition&, Coarsening),
                    std::map<int, std::unique_ptr<LazyClosure<TaggedPartition>>>& registry, std::mutex& mu) {
    check_tagged(q);
    check_tagged(p);
    if (q.p.n() != p.p.n()) throw InvalidArgument("tagged partitions over different party counts");
    const int n = p.p.n();
    if (n > kMaxTaggedClosureParties) throw UnsupportedError("tagged hierarchy closure is limited to n <= 6");
    auto step = [basic](const TaggedPartition& lo, const TaggedPartition& hi) {
        return basic(lo, hi, Coarsening::a) || basic(lo, hi, Coarsening::b) || basic(lo, hi, Coarsening::c);
    };
    auto& c = closure_for<int, TaggedPartition>(registry, mu, n, [n, step] {
        return std::make_unique<LazyClosure<TaggedPartition>>(tagged_nodes(n), step);
    });
    return c.related(q, p);
}

}  // namespace

bool ke_hierarchy(const TaggedPartition& q, const TaggedPartition& p) {
    static std::map<int, std::unique_ptr<LazyClosure<TaggedPartition>>> registry;
    static std::mutex mu;
    return tagged_closure(q, p, ke_basic, registry, mu);
}

bool kpe_hierarchy(const TaggedPartition& q, const TaggedPartition& p) {
    static std::map<int, std::unique_ptr<LazyClosure<TaggedPartition>>> registry;
    static std::mutex mu;
    return tagged_closure(q, p, kpe_basic, registry, mu);
}

std::string SteeringSplit::to_string() const { return untrusted.to_string() + ";" + trusted.to_string(); }

SteeringSplit make_split(int t, SubRepartition untrusted, SubRepartition trusted) {
    const int n = untrusted.n();
    if (trusted.n() != n) throw InvalidArgument("split halves over different party counts");
    if (t < 1 || t >= n) throw InvalidArgument("split point must satisfy 1 <= t < n");
    const Mask low = full_mask(t);
    if (untrusted.support() & ~low) throw InvalidArgument("untrusted blocks must lie in {1..t}");
    if (trusted.support() & low) throw InvalidArgument("trusted blocks must lie in {t+1..n}");
    return SteeringSplit{t, std::move(untrusted), std::move(trusted)};
}

SteeringSplit parse_split(const std::string& text, int t, int n) {
    auto pos = text.find(';');
    if (pos == std::string::npos) throw ParseError("split must have the form '<untrusted>;<trusted>'");
    auto u = parse_partition(text.substr(0, pos), n);
    auto tr = parse_partition(text.substr(pos + 1), n);
    try {
        return make_split(t, std::move(u), std::move(tr));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

bool steering_basic(const SteeringSplit& q, const SteeringSplit& p, Coarsening x, Coarsening y) {
    if (q.t != p.t || q.untrusted.n() != p.untrusted.n()) throw InvalidArgument("splits over different settings");
    bool untrusted_ok = false;
    switch (x) {
        case Coarsening::a: untrusted_ok = coarser_basic(q.untrusted, p.untrusted, Coarsening::a); break;
        case Coarsening::b: untrusted_ok = coarser_basic(p.untrusted, q.untrusted, Coarsening::b); break;
        case Coarsening::c: untrusted_ok = coarser_basic(q.untrusted, p.untrusted, Coarsening::c); break;
    }
    return untrusted_ok && coarser_basic(q.trusted, p.trusted, y);
}

bool steering_hierarchy(const SteeringSplit& q, const SteeringSplit& p) {
    if (q.t != p.t || q.untrusted.n() != p.untrusted.n()) throw InvalidArgument("splits over different settings");
    const int n = p.untrusted.n();
    const int t = p.t;
    if (n > kMaxClosureParties) throw UnsupportedError("steering hierarchy closure is limited to n <= 7");
    static std::map<std::pair<int, int>, std::unique_ptr<LazyClosure<SteeringSplit>>> registry;
    static std::mutex mu;
    auto make = [n, t] {
        std::vector<SteeringSplit> nodes;
        auto all = enumerate_subrepartitions(n);
        const Mask low = full_mask(t);
        for (const auto& u : all) {
            if (u.support() & ~low) continue;
            for (const auto& tr : all) {
                if (tr.support() & low) continue;
                nodes.push_back(SteeringSplit{t, u, tr});
            }
        }
        auto step = [](const SteeringSplit& lo, const SteeringSplit& hi) {
            for (Coarsening x : {Coarsening::a, Coarsening::b, Coarsening::c})
                for (Coarsening y : {Coarsening::a, Coarsening::b, Coarsening::c})
                    if (steering_basic(lo, hi, x, y)) return true;
            return false;
        };
        return std::make_unique<LazyClosure<SteeringSplit>>(std::move(nodes), step);
    };
    auto& c = closure_for<std::pair<int, int>, SteeringSplit>(registry, mu, {n, t}, make);
    return c.related(q, p);
}

std::vector<SubRepartition> complementarity(const SubRepartition& p, const SubRepartition& q) {
    if (!coarser(q, p)) throw InvalidArgument("complementarity needs Q <= P");
    const Mask qsupp = q.support();
    std::set<SubRepartition> out;
    for (const auto& r : enumerate_subrepartitions(p.n())) {
        if ((r.support() & ~p.support()) != 0) continue;
        // Blocks sit inside distinct blocks of P (types a and c).
        bool inside = true;
        Mask used = 0;
        for (Mask rb : r.masks()) {
            bool found = false;
            for (std::size_t j = 0; j < p.size(); ++j)
                if ((p.block(j) & rb) == rb && !(used & (Mask{1} << j))) {
                    used |= Mask{1} << j;
                    found = true;
                    break;
                }
            if (!found) {
                inside = false;
                break;
            }
        }
        // Blocks are unions of blocks of P (types a and b).
        bool unions = coarser_basic(r, p, Coarsening::b);
        if (!inside && !unions) continue;
        if (coarser(r, q) || coarser(q, r)) continue;
        bool mixes = false;
        for (Mask rb : r.masks())
            if ((rb & qsupp) && (rb & ~qsupp)) mixes = true;
        if (mixes) continue;
        std::vector<Mask> kept;
        Mask merged = 0;
        int verbatim = 0;
        for (Mask rb : r.masks()) {
            if (std::find(q.masks().begin(), q.masks().end(), rb) != q.masks().end()) {
                merged |= rb;
                ++verbatim;
            } else {
                kept.push_back(rb);
            }
        }
        if (verbatim > 0) kept.push_back(merged);
        if (kept.size() < 2) continue;
        out.insert(SubRepartition(p.n(), std::move(kept)));
    }
    return {out.begin(), out.end()};
}

}  // namespace mqc
