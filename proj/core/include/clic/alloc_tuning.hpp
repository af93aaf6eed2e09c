#pragma once

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace clic {

// Training allocates and frees the same large Eigen temporaries thousands of
// times per second. glibc serves blocks above 128 KiB with mmap by default,
// so every one of those costs a pair of syscalls and fresh page faults.
// Keeping them on the heap roughly halves wall time. Executables opt in; the
// library never touches allocator policy on its own.
inline void keep_large_allocations_on_heap() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 128 << 20);
#endif
}

}  // namespace clic
