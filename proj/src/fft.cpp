#include "fft.hpp"

#include <map>
#include <mutex>

#include <fftw3.h>

#include "wrmsm/errors.hpp"

namespace wrmsm::detail {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are cached per size for the life of the process.
class PlanCache {
public:
    fftw_plan forward(int size) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(size);
        if (it != plans_.end()) return it->second;
        std::vector<std::complex<double>> scratch(static_cast<std::size_t>(size));
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft_1d(size, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw DegenerateError("FFTW could not create a plan");
        plans_.emplace(size, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [size, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::map<int, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

}  // namespace

void fft_forward(std::vector<std::complex<double>>& data) {
    if (data.empty()) return;
    fftw_plan plan = cache().forward(static_cast<int>(data.size()));
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

}  // namespace wrmsm::detail
