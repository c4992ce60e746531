#include "bridged/random.hpp"

namespace bridged {

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngSeed derive_seed(RngSeed parent, std::uint64_t stream) {
    return RngSeed{mix(mix(parent.value) ^ mix(stream + 0x632be59bd9b4e019ULL))};
}

RngSeed derive_seed(RngSeed parent, std::uint64_t stream, std::uint64_t sub) {
    return derive_seed(derive_seed(parent, stream), sub);
}

Engine make_engine(RngSeed seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed.value),
                      static_cast<std::uint32_t>(seed.value >> 32)};
    return Engine(seq);
}

}  // namespace bridged
