#pragma once

#include <stdexcept>
#include <string>

namespace frtcd {

// Every error the library raises derives from frtcd::error. The category
// drives the CLI exit code.
enum class error_category {
    input = 2,         // malformed or inconsistent input
    computation = 3,   // numerical or resource failure during a computation
    precondition = 4,  // method precondition violated (e.g. non-EI inversion)
};

class error : public std::runtime_error {
   public:
    error(error_category cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}

    error_category category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

   private:
    error_category category_;
};

struct input_error : error {
    explicit input_error(const std::string& msg)
        : error(error_category::input, msg) {}
};

struct computation_error : error {
    explicit computation_error(const std::string& msg)
        : error(error_category::computation, msg) {}
};

struct precondition_error : error {
    explicit precondition_error(const std::string& msg)
        : error(error_category::precondition, msg) {}
};

// Total assignment count exceeds the enumeration cap.
struct cap_exceeded_error : computation_error {
    using computation_error::computation_error;
};

// Studentized statistic with zero pooled variance.
struct degenerate_statistic_error : computation_error {
    using computation_error::computation_error;
};

// Inversion requested for a statistic without a monotone p-value function.
struct non_monotone_statistic_error : precondition_error {
    using precondition_error::precondition_error;
};

// Requested levels produce lower > upper.
struct level_too_high_error : computation_error {
    using computation_error::computation_error;
};

}  // namespace frtcd
