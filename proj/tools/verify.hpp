#pragma once

#include <cstdint>
#include <ostream>

namespace ice {

// Runs the invariant/theorem suite with fixed sizes; prints one line per
// check. Returns the number of failed checks. The report depends only on the
// seed, never on wall clock or worker count.
int run_verify(std::uint64_t seed, std::ostream& out);

}  // namespace ice
