#pragma once

// Serial counterparts of the parallel kernels. Same arithmetic, same
// per-item RNG streams, no threading pragmas. Outputs must match the
// parallel versions byte for byte; the thread-invariance test and the
// benchmark both lean on that.

#include <cstdint>

#include "cantorlab/cantor.hpp"
#include "cantorlab/energy.hpp"
#include "cantorlab/fourier.hpp"
#include "cantorlab/geometry.hpp"

namespace cantorlab::reference {

EndpointSet extend_endpoints(const EndpointSet& A_prev,
                             const EndpointSet& P_prev,
                             const ParamSequences& seq, std::uint64_t seed);

DecayReport decay_profile(const StageMeasure& mu, double exponent,
                          const DecayGrid& grid);

FrostmanReport verify_frostman(const StageMeasure& mu, int d, double alpha,
                               int samples, std::uint64_t seed);

// Sparse convolution route only; the transform route is what it checks.
SumsetProfile sumset_profile(const EndpointSet& P, const ParamSequences& seq,
                             int r);

}  // namespace cantorlab::reference
