#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "recdiag/errors.hpp"
#include "recdiag/rng.hpp"

namespace recdiag {

/// An ordering of the observations, as 1-based indices.
using Permutation = std::vector<int>;

enum class ScheduleKind { Circular, RandomN, Exhaustive };

inline const char* to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::Circular: return "circular";
        case ScheduleKind::RandomN: return "random";
        case ScheduleKind::Exhaustive: return "exhaustive";
    }
    return "?";
}

/// Rule producing the orderings over which recursive traces are computed.
/// `N` and `seed` apply to RandomN only.
struct PermutationSchedule {
    ScheduleKind kind = ScheduleKind::Circular;
    int n = 0;
    int N = 0;
    std::uint64_t seed = 0;
};

inline constexpr int kMaxExhaustiveN = 10;
inline constexpr std::int64_t kMaxSuggestedExhaustive = 5040;  // 7!

inline std::int64_t factorial(int n) {
    std::int64_t f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

inline std::size_t schedule_count(const PermutationSchedule& sched) {
    switch (sched.kind) {
        case ScheduleKind::Circular: return static_cast<std::size_t>(sched.n);
        case ScheduleKind::RandomN: return static_cast<std::size_t>(sched.N);
        case ScheduleKind::Exhaustive: return static_cast<std::size_t>(factorial(sched.n));
    }
    return 0;
}

/// Materialize the schedule. Deterministic for fixed fields: circular shifts
/// in offset order, lexicographic enumeration, or seeded i.i.d. uniform
/// draws (Fisher-Yates, duplicates permitted).
inline std::vector<Permutation> schedule_permutations(const PermutationSchedule& sched) {
    if (sched.n < 1) {
        throw InvalidConfig("schedule requires n >= 1, got n=" + std::to_string(sched.n));
    }
    std::vector<Permutation> out;

    switch (sched.kind) {
        case ScheduleKind::Circular: {
            out.reserve(static_cast<std::size_t>(sched.n));
            for (int k = 1; k <= sched.n; ++k) {
                Permutation perm(static_cast<std::size_t>(sched.n));
                for (int i = 1; i <= sched.n; ++i) {
                    perm[static_cast<std::size_t>(i - 1)] = (i + k - 2) % sched.n + 1;
                }
                out.push_back(std::move(perm));
            }
            break;
        }
        case ScheduleKind::Exhaustive: {
            if (sched.n > kMaxExhaustiveN) {
                throw TooLargeForExhaustive("exhaustive schedule limited to n <= " +
                                            std::to_string(kMaxExhaustiveN) + ", got n=" +
                                            std::to_string(sched.n));
            }
            Permutation perm(static_cast<std::size_t>(sched.n));
            std::iota(perm.begin(), perm.end(), 1);
            out.reserve(static_cast<std::size_t>(factorial(sched.n)));
            do {
                out.push_back(perm);
            } while (std::next_permutation(perm.begin(), perm.end()));
            break;
        }
        case ScheduleKind::RandomN: {
            if (sched.N < 0) {
                throw InvalidConfig("random schedule requires N >= 0");
            }
            Rng rng(sched.seed);
            Permutation identity(static_cast<std::size_t>(sched.n));
            std::iota(identity.begin(), identity.end(), 1);
            out.reserve(static_cast<std::size_t>(sched.N));
            for (int k = 0; k < sched.N; ++k) {
                Permutation perm = identity;
                rng.shuffle(perm);
                out.push_back(std::move(perm));
            }
            break;
        }
    }
    return out;
}

/// Sample-size rule: exhaustive when n! stays within 5040, circular from
/// n = 50 up, seeded random draws in between (N = max(100, n)).
inline PermutationSchedule suggest_schedule(int n) {
    if (n < 1) {
        throw InvalidConfig("suggest_schedule requires n >= 1");
    }
    PermutationSchedule sched;
    sched.n = n;
    if (n >= 50) {
        sched.kind = ScheduleKind::Circular;
    } else if (n <= kMaxExhaustiveN && factorial(n) <= kMaxSuggestedExhaustive) {
        sched.kind = ScheduleKind::Exhaustive;
    } else {
        sched.kind = ScheduleKind::RandomN;
        sched.N = std::max(100, n);
        sched.seed = 0;
    }
    return sched;
}

}  // namespace recdiag
