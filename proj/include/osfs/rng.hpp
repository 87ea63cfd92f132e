#ifndef OSFS_RNG_HPP
#define OSFS_RNG_HPP

#include <cstdint>
#include <random>

namespace osfs {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for an independent sub-stream; changing `stream` never perturbs any
// other stream derived from the same parent.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept
{
    return mix64(mix64(parent) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

} // namespace osfs

#endif // OSFS_RNG_HPP
