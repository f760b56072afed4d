#pragma once

#include "teacheval/access.hpp"
#include "teacheval/bank.hpp"
#include "teacheval/error.hpp"
#include "teacheval/store.hpp"

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <variant>

namespace teacheval {

// Atomic, copy-on-write holder for the live campaign configuration.
// Readers take a snapshot at request start and keep it for the request.
class ConfigCell {
public:
    explicit ConfigCell(CampaignConfig initial)
        : current_(std::make_shared<const CampaignConfig>(std::move(initial))) {}

    std::shared_ptr<const CampaignConfig> snapshot() const { return std::atomic_load(&current_); }
    void publish(CampaignConfig next) {
        std::atomic_store(&current_, std::make_shared<const CampaignConfig>(std::move(next)));
    }

private:
    std::shared_ptr<const CampaignConfig> current_;
};

struct Progress {
    int answered = 0;
    int total = 0;
};

struct QuestionView {
    Question question;
    std::string teacher_id;
    std::string teacher_display_name;
    Progress progress;
    SessionMode mode = SessionMode::Demo;
    std::optional<std::string> status_message;
};

struct CompletedNotice {
    std::string teacher_display_name;
    SessionMode mode = SessionMode::Demo;
    Progress progress;
};

struct ClosedNotice {};

struct DeadlineNotice {
    std::string teacher_display_name;
    SessionMode mode = SessionMode::Demo;
    Progress progress;
};

using OpenResult = std::variant<QuestionView, CompletedNotice, ClosedNotice, DeadlineNotice>;

struct Accepted {
    QuestionView next;
};

struct Completed {
    std::int64_t questionnaire_no = 0;
    CompletedNotice notice;
};

struct Rejected {
    ErrorCode reason;
    std::string message;
    // The authoritative current question, when one can still be answered.
    std::optional<QuestionView> retry;
    SessionMode mode = SessionMode::Closed;
};

using SubmitOutcome = std::variant<Accepted, Completed, Rejected>;

enum class DeadlineState { Within, Exceeded };

// Exceeded iff a deadline is configured and now - started_at > deadline.
DeadlineState check_deadline(const EvaluationSession& session, const CampaignConfig& config, Timestamp now);

// The questionnaire state machine. Sequence enforcement compares only
// against the persisted last_answered; nothing client-held is trusted.
class SessionEngine {
public:
    SessionEngine(Store& store, std::shared_ptr<const QuestionBank> bank);

    // Throws InvalidAddress, NoTeacherSelected.
    OpenResult open_or_resume(const IpAddress& client_ip, const CampaignConfig& config, Timestamp now);

    // raw = nullopt models a form posted with no radio selected.
    // Throws InvalidAddress only; every protocol violation is a Rejected.
    SubmitOutcome submit_answer(const IpAddress& client_ip, const CampaignConfig& config,
                                const std::string& teacher_id, int question_index,
                                std::optional<int> raw, Timestamp now);

    // Throws ResetForbidden outside Demo. Returns answer records removed.
    std::int64_t reset_demo(const IpAddress& client_ip, const CampaignConfig& config);

    std::shared_ptr<const QuestionBank> bank() const { return std::atomic_load(&bank_); }
    // Throws BankMismatch when the length changes.
    void replace_bank(std::shared_ptr<const QuestionBank> bank);

private:
    std::mutex& lock_for(const std::string& client_ip);
    QuestionView view_for(const QuestionBank& bank, const EvaluationSession& s, const std::string& teacher_name,
                          std::optional<std::string> message) const;
    std::string teacher_name(const std::string& id) const;

    Store& store_;
    std::shared_ptr<const QuestionBank> bank_;
    // Submit and reset for one address serialize on the same stripe.
    std::array<std::mutex, 64> stripes_;
};

} // namespace teacheval
