#include "frtcd/design.hpp"

#include "frtcd/error.hpp"
#include "frtcd/rng.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace frtcd {

namespace {

// C(n, k) in 64 bits, or nullopt on overflow.
std::optional<std::uint64_t> binomial_u64(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    }
    return static_cast<std::uint64_t>(r);
}

// Advance a sorted t-subset of {0..n-1} to its colex successor. Returns false
// (and resets to the first subset) on wrap-around.
bool next_colex(std::vector<std::size_t>& c, std::size_t n) {
    const std::size_t t = c.size();
    for (std::size_t j = 0; j < t; ++j) {
        const std::size_t limit = (j + 1 < t) ? c[j + 1] : n;
        if (c[j] + 1 < limit) {
            ++c[j];
            for (std::size_t i = 0; i < j; ++i) c[i] = i;
            return true;
        }
    }
    std::iota(c.begin(), c.end(), std::size_t{0});
    return false;
}

}  // namespace

design::design(kind k, std::vector<block> blocks) : kind_(k), blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw input_error("design needs at least one block");
    offsets_.reserve(blocks_.size());
    for (const auto& b : blocks_) {
        if (b.treated == 0 || b.treated >= b.size)
            throw input_error("every block needs 0 < treated < size (got size " +
                              std::to_string(b.size) + ", treated " + std::to_string(b.treated) + ")");
        offsets_.push_back(n_units_);
        n_units_ += b.size;
        n_treated_ += b.treated;
    }
}

design design::completely_randomized(std::size_t n_units, std::size_t n_treated) {
    return design(kind::crd, {block{n_units, n_treated}});
}

design design::randomized_block(std::vector<block> blocks) {
    return design(kind::rbd, std::move(blocks));
}

design design::balanced_blocks(std::size_t n_blocks, std::size_t block_size) {
    if (n_blocks == 0) throw input_error("need at least one block");
    if (block_size < 2 || block_size % 2 != 0) throw input_error("block size must be a positive even integer");
    if (n_blocks == 1) return completely_randomized(block_size, block_size / 2);
    return randomized_block(std::vector<block>(n_blocks, block{block_size, block_size / 2}));
}

bool design::admits(std::span<const std::uint8_t> w) const noexcept {
    if (w.size() != n_units_) return false;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        std::size_t treated = 0;
        for (std::size_t i = 0; i < blocks_[b].size; ++i) {
            const auto v = w[offsets_[b] + i];
            if (v > 1) return false;
            treated += v;
        }
        if (treated != blocks_[b].treated) return false;
    }
    return true;
}

std::string design::describe() const {
    std::ostringstream os;
    if (kind_ == kind::crd) {
        os << "CRD(" << n_units_ << "," << n_treated_ << ")";
    } else {
        os << "RBD[";
        for (std::size_t b = 0; b < blocks_.size(); ++b)
            os << (b ? "," : "") << "(" << blocks_[b].size << "," << blocks_[b].treated << ")";
        os << "]";
    }
    return os.str();
}

big_count binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    big_count r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

big_count total_assignments(const design& d) {
    big_count total = 1;
    for (const auto& b : d.blocks()) total *= binomial(b.size, b.treated);
    return total;
}

std::optional<std::uint64_t> total_assignments_u64(const design& d) {
    const big_count total = total_assignments(d);
    if (total > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    return total.convert_to<std::uint64_t>();
}

double assignment_probability(const design& d, std::span<const std::uint8_t> w) {
    const big_rational p = assignment_probability_exact(d, w);
    return p.convert_to<double>();
}

big_rational assignment_probability_exact(const design& d, std::span<const std::uint8_t> w) {
    if (w.size() != d.n_units())
        throw input_error("assignment has length " + std::to_string(w.size()) + ", design has " +
                          std::to_string(d.n_units()) + " units");
    if (!d.admits(w)) return big_rational(0);
    return big_rational(big_count(1), total_assignments(d));
}

assignment_enumerator::assignment_enumerator(const design& d) : design_(&d), w_(d.n_units(), 0) {
    chosen_.reserve(d.blocks().size());
    for (std::size_t b = 0; b < d.blocks().size(); ++b) {
        std::vector<std::size_t> c(d.blocks()[b].treated);
        std::iota(c.begin(), c.end(), std::size_t{0});
        for (auto i : c) w_[d.block_offset(b) + i] = 1;
        chosen_.push_back(std::move(c));
    }
}

void assignment_enumerator::advance() {
    if (done_) return;
    const auto& blocks = design_->blocks();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const std::size_t off = design_->block_offset(b);
        for (auto i : chosen_[b]) w_[off + i] = 0;
        const bool moved = next_colex(chosen_[b], blocks[b].size);
        for (auto i : chosen_[b]) w_[off + i] = 1;
        if (moved) return;
    }
    done_ = true;
}

assignment_set::assignment_set(std::size_t n_units, std::vector<std::uint8_t> flat, bool exhaustive)
    : n_units_(n_units), flat_(std::move(flat)), exhaustive_(exhaustive) {
    if (n_units_ == 0 || flat_.size() % n_units_ != 0)
        throw input_error("assignment_set storage is not a whole number of assignments");
}

assignment_set enumerate_assignments(const design& d, std::uint64_t cap) {
    const big_count total = total_assignments(d);
    if (total > cap)
        throw cap_exceeded_error("design " + d.describe() + " has " + total.str() +
                                 " assignments, above the enumeration cap of " + std::to_string(cap));
    const auto n = total.convert_to<std::uint64_t>();
    std::vector<std::uint8_t> flat;
    flat.reserve(n * d.n_units());
    for (assignment_enumerator it(d); !it.done(); it.advance()) {
        const auto w = it.current();
        flat.insert(flat.end(), w.begin(), w.end());
    }
    return assignment_set(d.n_units(), std::move(flat), true);
}

std::vector<std::size_t> unrank_colex(std::uint64_t rank, std::size_t n, std::size_t t) {
    std::vector<std::size_t> out(t);
    std::size_t hi = n;
    for (std::size_t i = t; i >= 1; --i) {
        // largest c < hi with C(c, i) <= rank
        std::size_t c = i - 1;
        while (c + 1 < hi && *binomial_u64(c + 1, i) <= rank) ++c;
        rank -= *binomial_u64(c, i);
        out[i - 1] = c;
        hi = c;
    }
    return out;
}

void sample_assignment(const design& d, std::uint64_t seed, std::uint64_t index,
                       std::span<std::uint8_t> out) {
    counter_rng rng(seed, index);
    std::fill(out.begin(), out.end(), std::uint8_t{0});
    for (std::size_t b = 0; b < d.blocks().size(); ++b) {
        const auto& blk = d.blocks()[b];
        const std::size_t off = d.block_offset(b);
        if (auto count = binomial_u64(blk.size, blk.treated)) {
            for (auto i : unrank_colex(rng.uniform_below(*count), blk.size, blk.treated)) out[off + i] = 1;
        } else {
            // Block too large to rank in 64 bits: selection sampling, also exactly uniform.
            std::size_t need = blk.treated;
            for (std::size_t i = 0; i < blk.size && need > 0; ++i) {
                if (rng.uniform_below(blk.size - i) < need) {
                    out[off + i] = 1;
                    --need;
                }
            }
        }
    }
}

assignment_set sample_assignments(const design& d, std::uint64_t k, std::uint64_t seed) {
    if (k == 0) throw input_error("sample size must be positive");
    const std::size_t n = d.n_units();
    std::vector<std::uint8_t> flat(k * n);
    for (std::uint64_t j = 0; j < k; ++j) sample_assignment(d, seed, j, {flat.data() + j * n, n});
    return assignment_set(n, std::move(flat), false);
}

}  // namespace frtcd
