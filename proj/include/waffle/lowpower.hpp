#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "waffle/errors.hpp"

namespace waffle {

// Direct sum of cyclic groups of prime order, encoded as the sorted multiset
// of primes. Isomorphism type is determined by the order, which is what makes
// all the augmentation bookkeeping downstream a matter of integer arithmetic.
struct LowPowerGroup {
    using PrimeList = boost::container::small_vector<std::int64_t, 10>;
    PrimeList primes; // sorted ascending

    bool trivial() const { return primes.empty(); }

    unsigned long long order() const {
        unsigned __int128 n = 1;
        for (auto p : primes) {
            n *= static_cast<unsigned __int128>(p);
            require(n <= static_cast<unsigned __int128>(UINT64_MAX), errc::index_out_of_range,
                    "low power group order overflows 64 bits");
        }
        return static_cast<unsigned long long>(n);
    }

    std::string to_string() const {
        if (primes.empty()) return "1";
        std::string s;
        for (std::size_t i = 0; i < primes.size(); ++i) {
            if (i) s += "+";
            s += "C" + std::to_string(primes[i]);
        }
        return s;
    }
};

inline bool operator==(const LowPowerGroup& a, const LowPowerGroup& b) {
    return a.primes == b.primes;
}

namespace detail {

inline LowPowerGroup factorize(unsigned long long n) {
    LowPowerGroup g;
    for (unsigned long long p = 2; p * p <= n; ++p) {
        while (n % p == 0) {
            g.primes.push_back(static_cast<std::int64_t>(p));
            n /= p;
        }
    }
    if (n > 1) g.primes.push_back(static_cast<std::int64_t>(n));
    std::sort(g.primes.begin(), g.primes.end());
    return g;
}

} // namespace detail

inline LowPowerGroup lowpower(unsigned long long n) {
    require(n >= 1, errc::non_positive_length, "group order must be positive");
    static const std::vector<LowPowerGroup> small = [] {
        std::vector<LowPowerGroup> table;
        for (unsigned long long k = 0; k <= 64; ++k)
            table.push_back(k == 0 ? LowPowerGroup{} : detail::factorize(k));
        return table;
    }();
    if (n <= 64) return small[n];
    return detail::factorize(n);
}

inline LowPowerGroup lp_sum(const LowPowerGroup& a, const LowPowerGroup& b) {
    LowPowerGroup out;
    out.primes.reserve(a.primes.size() + b.primes.size());
    std::merge(a.primes.begin(), a.primes.end(), b.primes.begin(), b.primes.end(),
               std::back_inserter(out.primes));
    return out;
}

inline LowPowerGroup lp_quotient(const LowPowerGroup& a, const LowPowerGroup& b) {
    LowPowerGroup out;
    out.primes.reserve(a.primes.size());
    auto it = a.primes.begin();
    for (auto p : b.primes) {
        bool found = false;
        while (it != a.primes.end()) {
            if (*it == p) {
                ++it;
                found = true;
                break;
            }
            if (*it > p) break;
            out.primes.push_back(*it++);
        }
        require(found, errc::not_divisible, "quotient multiset is not contained in the numerator");
    }
    out.primes.insert(out.primes.end(), it, a.primes.end());
    return out;
}

inline bool lp_iso(const LowPowerGroup& a, const LowPowerGroup& b) {
    // isomorphism is determined by cardinality; with the canonical multiset
    // encoding that is plain equality
    return a.order() == b.order();
}

// ---------------------------------------------------------------------------
// Basic churro groups

enum class CoreFactor { Z, ZxZ2 }; // infinite cyclic vs infinite dihedral core

struct BasicChurroGroup {
    CoreFactor core = CoreFactor::Z;
    std::vector<LowPowerGroup> flap_factor; // one per flap-family orbit
};

inline BasicChurroGroup basic_churro_group(const std::vector<unsigned long long>& flap_family_sizes,
                                           CoreFactor core) {
    BasicChurroGroup g;
    g.core = core;
    g.flap_factor.reserve(flap_family_sizes.size());
    for (auto n : flap_family_sizes) {
        require(n >= 1, errc::non_positive_length, "flap family sizes must be positive");
        g.flap_factor.push_back(lowpower(n));
    }
    return g;
}

// Descriptor for the stabilizer of an identified strand / flap side: a
// distinguished infinite cyclic part, an optional order-two reflection, a low
// power part, and a count of additional order-two reflector factors.
struct StabilizerDescriptor {
    CoreFactor core = CoreFactor::Z;
    bool tau_flag = false;
    LowPowerGroup lp_part;
    int reflector_count = 0;

    unsigned long long finite_order() const {
        unsigned long long n = lp_part.order();
        for (int i = 0; i < reflector_count + (tau_flag ? 1 : 0); ++i) n *= 2;
        return n;
    }
};

inline StabilizerDescriptor flap_stabilizer(const BasicChurroGroup& g, std::size_t flap_index,
                                            CoreFactor core_stab) {
    require(flap_index < g.flap_factor.size(), errc::index_out_of_range,
            "flap index out of range");
    StabilizerDescriptor d;
    d.core = core_stab;
    for (std::size_t j = 0; j < g.flap_factor.size(); ++j)
        if (j != flap_index) d.lp_part = lp_sum(d.lp_part, g.flap_factor[j]);
    return d;
}

} // namespace waffle
