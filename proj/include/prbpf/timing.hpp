#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <string_view>

namespace prbpf {

/// Per-frame phase attribution for the tracker hot loop.
enum class Phase : std::size_t {
    Encode = 0,
    Similarity,
    Likelihood,
    Convolution,
    Depth,
    Resample,
    Expectation,
    Count
};

inline constexpr std::size_t kPhaseCount = static_cast<std::size_t>(Phase::Count);

inline constexpr std::array<std::string_view, kPhaseCount> kPhaseNames = {
    "encode", "similarity", "likelihood", "convolution", "depth", "resample", "expectation"};

struct StepTimings {
    std::array<double, kPhaseCount> seconds{};
    double total_seconds = 0.0;

    double phase(Phase p) const { return seconds[static_cast<std::size_t>(p)]; }

    StepTimings& operator+=(const StepTimings& o) {
        for (std::size_t i = 0; i < kPhaseCount; ++i) seconds[i] += o.seconds[i];
        total_seconds += o.total_seconds;
        return *this;
    }
};

class PhaseTimer {
  public:
    void reset() { timings_ = StepTimings{}; }

    template <typename Fn>
    auto time(Phase p, Fn&& fn) {
        const auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            add(p, start);
        } else {
            auto result = fn();
            add(p, start);
            return result;
        }
    }

    void add_total(double seconds) { timings_.total_seconds += seconds; }
    const StepTimings& timings() const { return timings_; }

  private:
    void add(Phase p, std::chrono::steady_clock::time_point start) {
        const auto end = std::chrono::steady_clock::now();
        timings_.seconds[static_cast<std::size_t>(p)] +=
            std::chrono::duration<double>(end - start).count();
    }

    StepTimings timings_;
};

}  // namespace prbpf
