#pragma once

#include <stdexcept>
#include <string>

namespace hsi {

// Error taxonomy maps onto CLI exit codes: domain_error -> 1,
// io_error -> 2, classifier_error -> 3.
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct classifier_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace hsi
