#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frtcd {

using big_count = boost::multiprecision::cpp_int;
using big_rational = boost::multiprecision::cpp_rational;

/// Binary treatment indicator per unit (1 = treated).
using assignment = std::vector<std::uint8_t>;

struct block {
    std::size_t size = 0;
    std::size_t treated = 0;

    friend bool operator==(const block&, const block&) = default;
};

/// Completely randomized or randomized block design. A CRD is stored as a
/// single block, so the two share every code path. Units are laid out block
/// by block: block 0 owns units [0, size_0), block 1 the next size_1, ...
class design {
   public:
    enum class kind { crd, rbd };

    static design completely_randomized(std::size_t n_units, std::size_t n_treated);
    static design randomized_block(std::vector<block> blocks);
    /// b blocks of size k with k/2 treated per block (k must be even).
    static design balanced_blocks(std::size_t n_blocks, std::size_t block_size);

    kind type() const noexcept { return kind_; }
    const std::vector<block>& blocks() const noexcept { return blocks_; }
    std::size_t n_units() const noexcept { return n_units_; }
    std::size_t n_treated() const noexcept { return n_treated_; }
    std::size_t n_control() const noexcept { return n_units_ - n_treated_; }
    std::size_t block_offset(std::size_t b) const { return offsets_.at(b); }

    /// True when w has the right length and per-block treated counts.
    bool admits(std::span<const std::uint8_t> w) const noexcept;

    std::string describe() const;

    friend bool operator==(const design& a, const design& b) {
        return a.blocks_ == b.blocks_;
    }

   private:
    design(kind k, std::vector<block> blocks);

    kind kind_;
    std::vector<block> blocks_;
    std::vector<std::size_t> offsets_;
    std::size_t n_units_ = 0;
    std::size_t n_treated_ = 0;
};

big_count binomial(std::size_t n, std::size_t k);

/// C(N, N1) for a CRD, product of C(k_b, t_b) for an RBD. Exact.
big_count total_assignments(const design& d);

/// total_assignments when it fits in 64 bits.
std::optional<std::uint64_t> total_assignments_u64(const design& d);

/// 1/total if w satisfies the design, else 0. Throws input_error on a length
/// mismatch.
double assignment_probability(const design& d, std::span<const std::uint8_t> w);
big_rational assignment_probability_exact(const design& d, std::span<const std::uint8_t> w);

/// Streams every assignment of a design once. Order: colexicographic by the
/// treated-index set within a block; across blocks the first block varies
/// fastest (mixed-radix product order).
class assignment_enumerator {
   public:
    explicit assignment_enumerator(const design& d);

    bool done() const noexcept { return done_; }
    std::span<const std::uint8_t> current() const noexcept { return w_; }
    void advance();

   private:
    const design* design_;
    std::vector<std::vector<std::size_t>> chosen_;  // per block, sorted local indices
    assignment w_;
    bool done_ = false;
};

/// A multiset of assignments with equal weight 1/size(). Either the full
/// assignment space (exhaustive) or a Monte Carlo sample with replacement.
class assignment_set {
   public:
    assignment_set() = default;
    assignment_set(std::size_t n_units, std::vector<std::uint8_t> flat, bool exhaustive);

    std::size_t n_units() const noexcept { return n_units_; }
    std::size_t size() const noexcept { return n_units_ == 0 ? 0 : flat_.size() / n_units_; }
    bool exhaustive() const noexcept { return exhaustive_; }

    std::span<const std::uint8_t> operator[](std::size_t j) const noexcept {
        return {flat_.data() + j * n_units_, n_units_};
    }

    /// Same assignments, relabelled as a Monte Carlo sample.
    assignment_set as_sample() const { return assignment_set(n_units_, flat_, false); }

   private:
    std::size_t n_units_ = 0;
    std::vector<std::uint8_t> flat_;
    bool exhaustive_ = false;
};

constexpr std::uint64_t default_enumeration_cap = 2'000'000;

/// Every assignment, in enumerator order. Throws cap_exceeded_error when the
/// total exceeds cap.
assignment_set enumerate_assignments(const design& d, std::uint64_t cap = default_enumeration_cap);

/// Draw `index` of the sampling stream keyed by seed. A pure function of
/// (design, seed, index), written into out (length n_units).
void sample_assignment(const design& d, std::uint64_t seed, std::uint64_t index,
                       std::span<std::uint8_t> out);

/// k iid uniform draws with replacement; draw j is sample_assignment(d, seed, j).
assignment_set sample_assignments(const design& d, std::uint64_t k, std::uint64_t seed);

/// Treated-index set (local to a block) of colex rank r among t-subsets.
std::vector<std::size_t> unrank_colex(std::uint64_t rank, std::size_t n, std::size_t t);

}  // namespace frtcd
