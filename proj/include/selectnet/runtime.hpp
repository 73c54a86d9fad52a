#pragma once

namespace selectnet {

/// Keeps freed training buffers in the heap instead of returning them to the
/// kernel each iteration. Call once at program start.
void tune_allocator();

}  // namespace selectnet
