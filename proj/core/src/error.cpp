#include "aad/error.hpp"

namespace aad {

SingularSystem::SingularSystem(const std::string& what, double smallest_pivot)
    : Error(what), smallest_pivot_(smallest_pivot) {}

}  // namespace aad
