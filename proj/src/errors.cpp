#include "hypolap/errors.hpp"

namespace hypolap {

void throw_invalid(const std::string& what) { throw InvalidArgument(what); }

}  // namespace hypolap
