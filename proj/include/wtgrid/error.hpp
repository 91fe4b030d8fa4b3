#pragma once

#include <stdexcept>
#include <string>

namespace wtgrid {

enum class Errc {
    out_of_range,
    not_found,
    empty_range,
    invalid_argument,
    data,
    corrupt,
    version,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace wtgrid
