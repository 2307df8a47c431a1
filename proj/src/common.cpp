#include "quadcurl/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>

namespace quadcurl {

int thread_count() {
    if (const char* env = std::getenv("QUADCURL_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t, int)>& body,
                     int nchunks) {
    nchunks = std::max(1, std::min<int>(nchunks, static_cast<int>(std::max<std::size_t>(n, 1))));
    if (nchunks == 1) {
        body(0, n, 0);
        return;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(nchunks);
    workers.reserve(nchunks);
    for (int c = 0; c < nchunks; ++c) {
        const std::size_t b = n * c / nchunks, e = n * (c + 1) / nchunks;
        workers.emplace_back([&body, &errors, b, e, c] {
            try {
                body(b, e, c);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    // Lowest chunk first keeps the reported failure deterministic.
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace quadcurl
