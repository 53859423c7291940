#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace herald {

/// Execution settings shared by the parallel kernels.
///
/// Work is split into fixed contiguous index blocks and every block writes
/// only its own output slots, so results do not depend on `threads`.
struct Exec {
    unsigned threads = 1;
};

template <class Fn>
void parallel_for(std::size_t n, const Exec& exec, Fn&& fn)
{
    const std::size_t workers = std::min<std::size_t>(std::max(1u, exec.threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end)
            break;
        pool.emplace_back([begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i)
                fn(i);
        });
    }
}

} // namespace herald
