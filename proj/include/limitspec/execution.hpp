#pragma once

#include <cstddef>
#include <functional>

namespace limitspec {

/// Grid sweeps and family unions run either as an OpenMP loop or as the plain
/// serial loop kept as the reference. Both evaluate each index with the same
/// code, so results are identical.
enum class Execution { serial, parallel };

void set_thread_count(int threads);
int thread_count();

void for_each_index(std::size_t count, Execution exec, const std::function<void(std::size_t)>& body);

}  // namespace limitspec
