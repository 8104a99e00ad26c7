#pragma once

// Exceptions must not cross an OpenMP region boundary. Run each iteration
// body through capture(); the first failure is kept and rethrown afterwards.

#include <exception>
#include <mutex>
#include <utility>

namespace tempest {

class FirstError {
public:
    template <class Body>
    void capture(Body&& body) noexcept {
        try {
            std::forward<Body>(body)();
        } catch (...) {
            std::lock_guard lock(guard_);
            if (!failure_) failure_ = std::current_exception();
        }
    }

    void rethrow() const {
        if (failure_) std::rethrow_exception(failure_);
    }

private:
    std::exception_ptr failure_;
    std::mutex guard_;
};

}  // namespace tempest
