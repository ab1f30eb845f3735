#include "monoquad/rng.hpp"

namespace monoquad {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : seed_(seed), stream_(stream), key_(mix64(mix64(seed + kGamma) ^ mix64(~stream * kGamma))) {}

RngStream::result_type RngStream::operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
}

double RngStream::uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

}  // namespace monoquad
