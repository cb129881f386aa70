#pragma once

namespace kld {

/// Worker threads used for multistart solves and grid scans. Results never
/// depend on this value: work items write to fixed slots and are reduced in
/// index order. Zero means "all hardware threads".
void set_thread_count(int threads);
int thread_count();

}  // namespace kld
