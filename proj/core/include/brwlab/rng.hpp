#ifndef BRWLAB_RNG_HPP
#define BRWLAB_RNG_HPP

#include <cstdint>
#include <random>

namespace brwlab {

// All randomness in the library is drawn from std::mt19937_64 engines whose
// seeds are derived with splitmix64 from a (run seed, replication index,
// generation index) triple.  Streams for distinct triples are effectively
// independent, and a run is reproducible from its seed alone regardless of
// thread scheduling, because every consumer owns its stream.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b + 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replication,
                                 std::uint64_t generation) {
    return mix_seed(mix_seed(seed, replication), generation);
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t replication,
                                   std::uint64_t generation) {
    return std::mt19937_64(stream_seed(seed, replication, generation));
}

// Named substreams for experiments that run several processes per seed
// (e.g. a red and a blue process, or a paired kernel comparison).
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
    return mix_seed(seed, 0xabcd000000000000ULL + tag);
}

} // namespace brwlab

#endif
