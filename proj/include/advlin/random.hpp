// Counter-based seed derivation and Gaussian sampling helpers.
#pragma once

#include "advlin/core.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace advlin {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

/// Deterministic child seed for stream `index` of `master`.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Child seed keyed by a sequence of labels, e.g. (master, experiment, replicate).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                        std::initializer_list<std::uint64_t> indices) noexcept;

[[nodiscard]] Vector standard_normal_vector(Rng& rng, Eigen::Index n);
[[nodiscard]] Matrix standard_normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);

/// Rows i.i.d. N(0, sigma): Z L' with L the Cholesky factor of sigma.
[[nodiscard]] Matrix gaussian_rows(Rng& rng, Eigen::Index rows, const Matrix& sigma_cholesky_lower);

}  // namespace advlin
