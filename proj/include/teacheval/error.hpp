#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace teacheval {

enum class ErrorCode {
    OutOfRange,
    BankGap,
    BankDuplicate,
    BankEmptyText,
    BankMismatch,
    BankFormat,
    InvalidAddress,
    ResetForbidden,
    NoTeacherSelected,
    DeadlineExceeded,
    OutOfSequence,
    MissingSelection,
    ValueOutOfRange,
    AlreadyCompleted,
    SessionClosed,
    ConflictRetry,
    StorageFailure,
    SchemaMismatch,
    Unauthorized,
    TeacherInUse,
    InvalidTeacher,
    NotFound,
    Incomplete,
    BadRequest,
};

// Stable machine code, e.g. "OUT_OF_SEQUENCE".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace teacheval
