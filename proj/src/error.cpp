#include "teacheval/error.hpp"

namespace teacheval {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::OutOfRange: return "OUT_OF_RANGE";
    case ErrorCode::BankGap: return "BANK_GAP";
    case ErrorCode::BankDuplicate: return "BANK_DUPLICATE";
    case ErrorCode::BankEmptyText: return "BANK_EMPTY_TEXT";
    case ErrorCode::BankMismatch: return "BANK_MISMATCH";
    case ErrorCode::BankFormat: return "BANK_FORMAT";
    case ErrorCode::InvalidAddress: return "INVALID_ADDRESS";
    case ErrorCode::ResetForbidden: return "RESET_FORBIDDEN";
    case ErrorCode::NoTeacherSelected: return "NO_TEACHER_SELECTED";
    case ErrorCode::DeadlineExceeded: return "DEADLINE_EXCEEDED";
    case ErrorCode::OutOfSequence: return "OUT_OF_SEQUENCE";
    case ErrorCode::MissingSelection: return "MISSING_SELECTION";
    case ErrorCode::ValueOutOfRange: return "VALUE_OUT_OF_RANGE";
    case ErrorCode::AlreadyCompleted: return "ALREADY_COMPLETED";
    case ErrorCode::SessionClosed: return "CAMPAIGN_CLOSED";
    case ErrorCode::ConflictRetry: return "CONFLICT_RETRY";
    case ErrorCode::StorageFailure: return "STORAGE_FAILURE";
    case ErrorCode::SchemaMismatch: return "SCHEMA_MISMATCH";
    case ErrorCode::Unauthorized: return "UNAUTHORIZED";
    case ErrorCode::TeacherInUse: return "TEACHER_IN_USE";
    case ErrorCode::InvalidTeacher: return "INVALID_TEACHER";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::Incomplete: return "INCOMPLETE";
    case ErrorCode::BadRequest: return "BAD_REQUEST";
    }
    return "UNKNOWN";
}

} // namespace teacheval
