#include "selectnet/runtime.hpp"

#include <malloc.h>

namespace selectnet {

void tune_allocator() {
  mallopt(M_MMAP_MAX, 0);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_TOP_PAD, 512 * 1024 * 1024);
}

}  // namespace selectnet
