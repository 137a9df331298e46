#pragma once

// Finite-difference verification of analytic gradients.
//
// Relative error between analytic a and numeric n is
//   |a - n| / max(|a|, |n|, 1e-6)
// so entries whose true gradient is essentially zero are judged on an
// absolute scale instead of amplifying rounding noise.

#include <cstdint>
#include <span>

#include "tactile/learn/layers.hpp"
#include "tactile/learn/network.hpp"

namespace tactile::learn {

double relative_error(double analytic, double numeric);

/// Checks every parameter and every input of `layer` against central
/// differences of the scalar loss sum_i r_i * out_i, with r drawn from
/// `seed`. Returns the largest relative error.
double gradient_check(Layer& layer, std::span<const double> input,
                      std::uint64_t seed, double epsilon = 1e-5);

/// Same for a whole network under softmax cross-entropy with `target`.
double gradient_check(Network& network, std::span<const double> input,
                      std::size_t target, double epsilon = 1e-5);

/// Checks the softmax cross-entropy gradient with respect to the logits.
double gradient_check_softmax_ce(std::span<const double> logits,
                                 std::size_t target, double epsilon = 1e-5);

}  // namespace tactile::learn
