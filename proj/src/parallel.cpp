#include "spikelab/parallel.hpp"

#include <atomic>
#include <thread>
#include <cstdlib>

namespace spikelab {

namespace {
int initial_threads() {
    if (const char* env = std::getenv("SPIKELAB_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int>& thread_count() {
    static std::atomic<int> n{initial_threads()};
    return n;
}
} // namespace

int num_threads() { return thread_count().load(); }

void set_num_threads(int n) { thread_count().store(n < 1 ? 1 : n); }

} // namespace spikelab
