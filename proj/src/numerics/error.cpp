#include "classo/error.hpp"

#include <sstream>

namespace classo {

namespace {

std::string pivot_message(std::size_t index, double pivot) {
    std::ostringstream os;
    os << "matrix is not positive definite (pivot " << index << " = " << pivot << ")";
    return os.str();
}

std::string location_message(const std::string& what, std::size_t row, std::size_t col) {
    std::ostringstream os;
    os << what << " at row " << row << ", column " << col;
    return os.str();
}

}  // namespace

NotPositiveDefinite::NotPositiveDefinite(std::size_t pivot_index, double pivot)
    : Error(pivot_message(pivot_index, pivot)), pivot_index_(pivot_index), pivot_(pivot) {}

SingularSystem::SingularSystem(const std::string& what, double rcond)
    : Error(what), rcond_(rcond) {}

NonConverged::NonConverged(const std::string& what, double kkt_violation,
                           std::optional<std::size_t> column)
    : Error(what), kkt_violation_(kkt_violation), column_(column) {}

ParseError::ParseError(const std::string& what, std::size_t row, std::size_t col)
    : Error(location_message(what, row, col)), row_(row), col_(col) {}

NonFiniteValue::NonFiniteValue(std::size_t row, std::size_t col)
    : ParseError("non-finite value", row, col) {}

}  // namespace classo
