#include "poexp/random.hpp"

// Everything in random.hpp is inline; this unit keeps the header self-contained under -Wall.
namespace poexp {
static_assert(splitmix64(0) == 0xE220A8397B1DCDAFULL);
}  // namespace poexp
