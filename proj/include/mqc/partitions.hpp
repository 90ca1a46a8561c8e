#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "mqc/errors.hpp"

namespace mqc {

using Mask = std::uint32_t;

// Largest number of subsystems for which basic relations and enumeration
// are available, and the largest for the memoized transitive closures.
inline constexpr int kMaxParties = 9;
inline constexpr int kMaxClosureParties = 7;
inline constexpr int kMaxTaggedClosureParties = 6;

// A partition of a non-empty subset of {0, ..., n-1} into disjoint non-empty
// blocks. Blocks are stored as bit masks in canonical order (sorted by their
// smallest element). The text form is 1-based: "1,2|3".
class SubRepartition {
public:
    SubRepartition() = default;
    SubRepartition(int n, std::vector<Mask> blocks);
    static SubRepartition from_blocks(int n, const std::vector<std::vector<int>>& blocks);
    static SubRepartition singletons(int n, Mask support);

    int n() const { return n_; }
    std::size_t size() const { return blocks_.size(); }
    const std::vector<Mask>& masks() const { return blocks_; }
    Mask block(std::size_t i) const { return blocks_[i]; }
    Mask support() const;
    std::size_t depth() const;
    std::vector<std::vector<int>> blocks() const;  // 0-based members
    std::string to_string() const;

    auto operator<=>(const SubRepartition&) const = default;

private:
    int n_ = 0;
    std::vector<Mask> blocks_;
};

std::vector<int> mask_members(Mask m);
int popcount(Mask m);

// Parses "1,2|3,4|5" (whitespace ignored, 1-based labels up to n).
SubRepartition parse_partition(const std::string& text, int n);

// Every sub-repartition of {0..n-1} with non-empty support.
std::vector<SubRepartition> enumerate_subrepartitions(int n);
// Every set partition of the members of `support`.
std::vector<SubRepartition> set_partitions_of(int n, Mask support);

enum class Coarsening { a, b, c };
char to_char(Coarsening t);

// Q <=^t P for a single coarsening type.
bool coarser_basic(const SubRepartition& q, const SubRepartition& p, Coarsening t);
// Transitive closure of the three basic relations (n <= 7, memoized).
bool coarser(const SubRepartition& q, const SubRepartition& p);

// Partitions of P's blocks into groups of at most k blocks each, returned as
// the induced sub-repartitions (unions of grouped blocks).
std::vector<SubRepartition> bounded_coarsenings(const SubRepartition& p, std::size_t k);
// Partitions of P's blocks into exactly k groups.
std::vector<SubRepartition> block_groupings(const SubRepartition& p, std::size_t k);

struct TaggedPartition {
    int k = 2;
    SubRepartition p;
    auto operator<=>(const TaggedPartition&) const = default;
};

bool ke_basic(const TaggedPartition& q, const TaggedPartition& p, Coarsening t);
bool ke_hierarchy(const TaggedPartition& q, const TaggedPartition& p);
bool kpe_basic(const TaggedPartition& q, const TaggedPartition& p, Coarsening t);
bool kpe_hierarchy(const TaggedPartition& q, const TaggedPartition& p);

// Untrusted parties live in {0..t-1}, trusted parties in {t..n-1}.
struct SteeringSplit {
    int t = 1;
    SubRepartition untrusted;
    SubRepartition trusted;
    auto operator<=>(const SteeringSplit&) const = default;
    std::string to_string() const;
};

SteeringSplit make_split(int t, SubRepartition untrusted, SubRepartition trusted);
// "<untrusted>;<trusted>" with 1-based labels over {1..n}.
SteeringSplit parse_split(const std::string& text, int t, int n);

// Basic steering relation of type (x, y): x acts on untrusted parties (the
// b-type direction is reversed there), y on trusted parties.
bool steering_basic(const SteeringSplit& q, const SteeringSplit& p, Coarsening x, Coarsening y);
bool steering_hierarchy(const SteeringSplit& q, const SteeringSplit& p);

// Complementary family of Q with respect to P (requires Q <= P).
std::vector<SubRepartition> complementarity(const SubRepartition& p, const SubRepartition& q);

}  // namespace mqc
