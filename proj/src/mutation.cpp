#include "projcond/mutation.hpp"

#include <cstdlib>
#include <string>

namespace projcond {

bool mutation_enabled(std::string_view name) {
    static const std::string active = [] {
        const char* v = std::getenv("PROJCOND_MUTATION");
        return std::string(v ? v : "");
    }();
    return !active.empty() && active == name;
}

}  // namespace projcond
