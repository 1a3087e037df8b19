#pragma once

namespace volwealth {

/// Worker count: `requested` if non-zero, else VOLWEALTH_THREADS if set to a
/// positive integer, else the hardware concurrency (at least 1).
unsigned resolve_threads(unsigned requested = 0);

}  // namespace volwealth
