#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "blursynth/image.hpp"
#include "blursynth/rng.hpp"

namespace blursynth {

enum class Connectivity { four = 4, eight = 8 };

struct Component {
    int id;                 // 0-based, in output order
    std::size_t pixel_count;
    BinaryMask mask;
};

/// Connected components of the true pixels, largest first; equal sizes keep
/// the order of their first pixel in row-major scan.
std::vector<Component> connected_components(const BinaryMask& mask,
                                            Connectivity connectivity = Connectivity::eight);

/// Largest connected blob of the most frequent non-background label (ties
/// go to the smaller label id). All-false when the map holds background only.
BinaryMask largest_object_mask(const LabelMap& labels, Connectivity connectivity = Connectivity::eight);

/// Label chosen by largest_object_mask (0 when there is none).
std::uint32_t dominant_label(const LabelMap& labels);

/// Class-agnostic object proposals ranked by an objectness score.
class ScoredProposalSet {
public:
    /// Throws ArgumentError on an empty set, length mismatch, non-finite
    /// score or proposals of differing size.
    ScoredProposalSet(std::vector<BinaryMask> proposals, std::vector<double> scores);

    std::size_t size() const noexcept { return proposals_.size(); }
    const BinaryMask& proposal(std::size_t i) const { return proposals_.at(i); }
    std::span<const double> scores() const noexcept { return scores_; }
    int width() const noexcept { return proposals_.front().width(); }
    int height() const noexcept { return proposals_.front().height(); }

private:
    std::vector<BinaryMask> proposals_;
    std::vector<double> scores_;
};

/// Max-subtracted softmax over the scores.
std::vector<double> proposal_distribution(std::span<const double> scores);

/// Index drawn from proposal_distribution; consumes exactly one uniform.
std::size_t sample_proposal_index(const ScoredProposalSet& set, Rng& rng);

BinaryMask sample_proposal_mask(const ScoredProposalSet& set, Rng& rng);

struct InvertResult {
    BinaryMask mask;
    bool inverted;
};

/// Complement with probability p_inv; consumes exactly one uniform.
InvertResult maybe_invert(const BinaryMask& mask, double p_inv, Rng& rng);

/// Reads `proposal_0000.png …` and `scores.txt` (one score per line) from dir.
ScoredProposalSet load_proposal_set(const std::filesystem::path& dir);
void save_proposal_set(const ScoredProposalSet& set, const std::filesystem::path& dir);

}  // namespace blursynth
