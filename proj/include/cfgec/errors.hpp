#ifndef CFGEC_ERRORS_HPP
#define CFGEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cfgec {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cfgec

#endif
