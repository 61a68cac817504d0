#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <string_view>
#include <vector>

namespace coevo {

/// Threshold used until the window holds two scores in distinct bins.
inline constexpr double kColdStartDelta = 0.5;

/// Sliding window of recent scores with an incrementally maintained
/// histogram over [0, 1].
class ScoreWindow {
public:
    ScoreWindow(std::size_t capacity, std::size_t bins);

    void push(double score);

    std::size_t size() const noexcept { return buffer_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t bins() const noexcept { return counts_.size(); }
    const std::vector<std::uint64_t>& histogram() const noexcept { return counts_; }
    const std::deque<double>& scores() const noexcept { return buffer_; }

    std::size_t bin_of(double score) const;

    bool operator==(const ScoreWindow&) const = default;

private:
    std::size_t capacity_;
    std::deque<double> buffer_;
    std::vector<std::uint64_t> counts_;
};

void push_score(ScoreWindow& w, double s);

/// Interior bin edge minimizing var(OOD side) + var(ID side) over bin-center
/// values; scores in bins below the edge fall on the OOD side. Lowest edge
/// wins ties. Falls back to kColdStartDelta when fewer than two bins are
/// occupied.
double compute_delta(const ScoreWindow& w);

enum class Decision { PredID, PredOOD, Ambiguous };

/// Lower gate: Alg1 is s < delta (1 - gamma); MainText is
/// s < delta - gamma (1 - delta).
enum class MarginForm { Alg1, MainText };

double lower_bound(double delta, double gamma, MarginForm form);
double upper_bound(double delta, double gamma);

Decision gate(double s, double delta, double gamma, MarginForm form = MarginForm::Alg1);

std::string_view to_string(Decision d);

}  // namespace coevo
