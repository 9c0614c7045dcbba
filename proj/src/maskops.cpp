#include "blursynth/maskops.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "blursynth/error.hpp"

namespace blursynth {

std::vector<Component> connected_components(const BinaryMask& mask, Connectivity connectivity)
{
    const int w = mask.width();
    const int h = mask.height();
    std::vector<int> label(mask.pixel_count(), -1);
    std::vector<std::vector<std::size_t>> members;
    std::vector<std::size_t> stack;

    const bool eight = connectivity == Connectivity::eight;
    for (int y0 = 0; y0 < h; ++y0)
        for (int x0 = 0; x0 < w; ++x0) {
            const std::size_t seed = static_cast<std::size_t>(y0) * w + x0;
            if (!mask.at(x0, y0) || label[seed] >= 0)
                continue;
            const int id = static_cast<int>(members.size());
            members.emplace_back();
            label[seed] = id;
            stack.push_back(seed);
            while (!stack.empty()) {
                const std::size_t p = stack.back();
                stack.pop_back();
                members[id].push_back(p);
                const int px = static_cast<int>(p % w);
                const int py = static_cast<int>(p / w);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if ((dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0))
                            continue;
                        const int nx = px + dx, ny = py + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h || !mask.at(nx, ny))
                            continue;
                        const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
                        if (label[q] < 0) {
                            label[q] = id;
                            stack.push_back(q);
                        }
                    }
            }
        }

    // discovery order is the order of first pixels, so a stable sort on size
    // gives the tie-break for free
    std::vector<std::size_t> order(members.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return members[a].size() > members[b].size(); });

    std::vector<Component> out;
    out.reserve(order.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        BinaryMask m(w, h);
        for (std::size_t p : members[order[rank]])
            m.data()[p] = 1;
        out.push_back({static_cast<int>(rank), members[order[rank]].size(), std::move(m)});
    }
    return out;
}

std::uint32_t dominant_label(const LabelMap& labels)
{
    std::map<std::uint32_t, std::size_t> counts;
    for (auto v : labels.data())
        if (v != 0)
            ++counts[v];
    std::uint32_t best = 0;
    std::size_t best_count = 0;
    for (const auto& [id, n] : counts)  // ascending ids: ties keep the smaller id
        if (n > best_count) {
            best = id;
            best_count = n;
        }
    return best;
}

BinaryMask largest_object_mask(const LabelMap& labels, Connectivity connectivity)
{
    BinaryMask binary(labels.width(), labels.height());
    const std::uint32_t target = dominant_label(labels);
    if (target == 0)
        return binary;
    for (std::size_t i = 0; i < binary.pixel_count(); ++i)
        binary.data()[i] = labels.data()[i] == target ? 1 : 0;
    auto components = connected_components(binary, connectivity);
    return std::move(components.front().mask);
}

ScoredProposalSet::ScoredProposalSet(std::vector<BinaryMask> proposals, std::vector<double> scores)
    : proposals_(std::move(proposals)), scores_(std::move(scores))
{
    if (proposals_.empty())
        throw ArgumentError("proposal set is empty");
    if (proposals_.size() != scores_.size())
        throw ArgumentError("proposal/score count mismatch: " + std::to_string(proposals_.size()) + " vs " +
                            std::to_string(scores_.size()));
    for (const auto& p : proposals_)
        if (!p.same_size(proposals_.front()))
            throw ArgumentError("proposals differ in size");
    for (double s : scores_)
        if (!std::isfinite(s))
            throw ArgumentError("proposal score is not finite");
}

std::vector<double> proposal_distribution(std::span<const double> scores)
{
    if (scores.empty())
        throw ArgumentError("softmax of an empty score list");
    const double top = *std::max_element(scores.begin(), scores.end());
    std::vector<double> p(scores.size());
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        p[i] = std::exp(scores[i] - top);
        total += p[i];
    }
    for (auto& v : p)
        v /= total;
    return p;
}

std::size_t sample_proposal_index(const ScoredProposalSet& set, Rng& rng)
{
    const auto p = proposal_distribution(set.scores());
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc)
            return i;
    }
    // u landed in the rounding gap above the accumulated sum
    for (std::size_t i = p.size(); i-- > 0;)
        if (p[i] > 0.0)
            return i;
    return p.size() - 1;
}

BinaryMask sample_proposal_mask(const ScoredProposalSet& set, Rng& rng)
{
    return set.proposal(sample_proposal_index(set, rng));
}

InvertResult maybe_invert(const BinaryMask& mask, double p_inv, Rng& rng)
{
    if (!(p_inv >= 0.0 && p_inv <= 1.0))
        throw ArgumentError("p_inv must be in [0,1]");
    if (rng.uniform() < p_inv)
        return {mask.complement(), true};
    return {mask, false};
}

namespace {

std::filesystem::path proposal_path(const std::filesystem::path& dir, std::size_t i)
{
    std::ostringstream name;
    name << "proposal_" << std::setw(4) << std::setfill('0') << i << ".png";
    return dir / name.str();
}

}  // namespace

ScoredProposalSet load_proposal_set(const std::filesystem::path& dir)
{
    std::ifstream in(dir / "scores.txt");
    if (!in)
        throw DecodeError("cannot read " + (dir / "scores.txt").string());
    std::vector<double> scores;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream ls(line);
        double s = 0.0;
        if (!(ls >> s))
            throw FormatError("bad score line '" + line + "' in " + (dir / "scores.txt").string());
        scores.push_back(s);
    }

    std::size_t files = 0;
    while (std::filesystem::exists(proposal_path(dir, files)))
        ++files;
    if (files != scores.size())
        throw FormatError("proposal count mismatch in " + dir.string() + ": " + std::to_string(files) +
                          " masks, " + std::to_string(scores.size()) + " scores");

    std::vector<BinaryMask> proposals;
    proposals.reserve(files);
    for (std::size_t i = 0; i < files; ++i)
        proposals.push_back(load_mask(proposal_path(dir, i)));
    return ScoredProposalSet(std::move(proposals), std::move(scores));
}

void save_proposal_set(const ScoredProposalSet& set, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "scores.txt");
    out << std::setprecision(17);
    for (std::size_t i = 0; i < set.size(); ++i) {
        save_mask(set.proposal(i), proposal_path(dir, i));
        out << set.scores()[i] << '\n';
    }
    if (!out)
        throw WriteError("cannot write " + (dir / "scores.txt").string());
}

}  // namespace blursynth
