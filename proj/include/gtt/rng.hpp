#ifndef GTT_RNG_HPP
#define GTT_RNG_HPP

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace gtt {

// Seedable deterministic generator. All randomness in the toolkit flows
// through this type so that a root seed fixes every downstream draw.
// Independent consumers derive their own stream via Rng::stream().
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    // Stream `index` derived from a root seed; streams with different
    // indices are statistically independent.
    static Rng stream(std::uint64_t root_seed, std::uint64_t index) {
        return Rng(mix(root_seed) ^ mix(index * 0x9e3779b97f4a7c15ull + 1));
    }

    // Uniform on the open interval (0,1); never returns 0 or 1 exactly.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection to avoid modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do { x = engine_(); } while (x >= limit);
        return x % n;
    }

    std::uint64_t raw() { return engine_(); }

    std::string save_state() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }
    void load_state(const std::string& s) {
        std::istringstream is(s);
        is >> engine_;
    }

    bool operator==(const Rng& o) const { return engine_ == o.engine_; }

private:
    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

} // namespace gtt

#endif
