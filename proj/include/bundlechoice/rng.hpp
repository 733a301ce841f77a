#pragma once

#include <cmath>
#include <cstdint>

namespace bundlechoice {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) { return splitmix64(a ^ splitmix64(b)); }
inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) { return mix_seed(mix_seed(a, b), c); }
inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
    return mix_seed(mix_seed(a, b, c), d);
}

// Counter-based stream: draws depend only on (key, draw index), so any
// (individual, period) stream can be created independently on any thread.
class RngStream {
public:
    explicit RngStream(uint64_t key) : key_(key) {}

    double u01() {  // (0, 1)
        uint64_t r = splitmix64(key_ ^ splitmix64(ctr_++));
        return (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = u01(), u2 = u01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double gumbel() { return -std::log(-std::log(u01())); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Correlated pair with unit variances.
    void binormal(double mean1, double mean2, double rho, double& out1, double& out2) {
        double z1 = normal(), z2 = normal();
        out1 = mean1 + z1;
        out2 = mean2 + rho * z1 + std::sqrt(1.0 - rho * rho) * z2;
    }

    bool bernoulli(double p) { return u01() < p; }

    uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(ctr_++)); }

private:
    uint64_t key_;
    uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace bundlechoice
