#include "teacheval/engine.hpp"

#include <functional>

namespace teacheval {

DeadlineState check_deadline(const EvaluationSession& session, const CampaignConfig& config, Timestamp now) {
    if (!config.deadline_seconds) return DeadlineState::Within;
    auto elapsed = (now - session.started_at).count();
    return elapsed > *config.deadline_seconds ? DeadlineState::Exceeded : DeadlineState::Within;
}

SessionEngine::SessionEngine(Store& store, std::shared_ptr<const QuestionBank> bank)
    : store_(store), bank_(std::move(bank)) {
    if (!bank_ || bank_->empty()) throw Error(ErrorCode::BankFormat, "the session engine needs a non-empty bank");
}

void SessionEngine::replace_bank(std::shared_ptr<const QuestionBank> bank) {
    if (!bank || bank->size() != this->bank()->size()) {
        throw Error(ErrorCode::BankMismatch, "replacement bank must keep " + std::to_string(this->bank()->size()) +
                                                 " questions");
    }
    std::atomic_store(&bank_, std::move(bank));
}

std::mutex& SessionEngine::lock_for(const std::string& client_ip) {
    return stripes_[std::hash<std::string>{}(client_ip) % stripes_.size()];
}

std::string SessionEngine::teacher_name(const std::string& id) const {
    auto t = store_.find_teacher(id);
    return t ? t->teacher.display_name : id;
}

QuestionView SessionEngine::view_for(const QuestionBank& bank, const EvaluationSession& s,
                                     const std::string& name, std::optional<std::string> message) const {
    QuestionView v;
    v.question = bank.at(s.last_answered + 1);
    v.teacher_id = s.key.teacher_id;
    v.teacher_display_name = name;
    v.progress = {s.last_answered, bank.size()};
    v.mode = s.mode;
    v.status_message = std::move(message);
    return v;
}

OpenResult SessionEngine::open_or_resume(const IpAddress& client_ip, const CampaignConfig& config, Timestamp now) {
    auto decision = classify_access(client_ip, config);
    if (decision.mode == SessionMode::Closed) return ClosedNotice{};
    if (!config.current_teacher) throw Error(ErrorCode::NoTeacherSelected, "campaign active without a teacher");

    auto bank = this->bank();
    SessionKey key{client_ip.str(), *config.current_teacher};
    std::string name = teacher_name(key.teacher_id);

    std::lock_guard lock(lock_for(key.client_ip));
    auto session = store_.find_session(key);
    if (!session) {
        EvaluationSession fresh;
        fresh.key = key;
        fresh.mode = decision.mode;
        fresh.started_at = now;
        session = store_.create_session(fresh);
    }
    Progress progress{session->last_answered, bank->size()};
    if (session->complete()) return CompletedNotice{name, session->mode, progress};
    if (check_deadline(*session, config, now) == DeadlineState::Exceeded) {
        return DeadlineNotice{name, session->mode, progress};
    }
    return view_for(*bank, *session, name, std::nullopt);
}

SubmitOutcome SessionEngine::submit_answer(const IpAddress& client_ip, const CampaignConfig& config,
                                           const std::string& teacher_id, int question_index,
                                           std::optional<int> raw, Timestamp now) {
    auto decision = classify_access(client_ip, config);
    if (decision.mode == SessionMode::Closed) {
        return Rejected{ErrorCode::SessionClosed, "the evaluation campaign is not active", std::nullopt,
                        SessionMode::Closed};
    }
    if (!config.current_teacher || *config.current_teacher != teacher_id) {
        return Rejected{ErrorCode::SessionClosed, "this teacher is not currently being evaluated", std::nullopt,
                        decision.mode};
    }

    auto bank = this->bank();
    const int total = bank->size();
    SessionKey key{client_ip.str(), teacher_id};
    std::string name = teacher_name(teacher_id);

    std::lock_guard lock(lock_for(key.client_ip));
    auto session = store_.find_session(key);
    EvaluationSession current;
    if (session) {
        current = *session;
    } else {
        current.key = key;
        current.mode = decision.mode;
        current.started_at = now;
    }

    auto reject = [&](ErrorCode code, std::string message, bool with_retry) -> SubmitOutcome {
        Rejected r{code, message, std::nullopt, current.mode};
        if (with_retry) r.retry = view_for(*bank, current, name, message);
        return r;
    };

    if (current.complete()) {
        return reject(ErrorCode::AlreadyCompleted, "this questionnaire has already been completed", false);
    }
    if (session && check_deadline(current, config, now) == DeadlineState::Exceeded) {
        return reject(ErrorCode::DeadlineExceeded, "the time allowed for this questionnaire has run out", false);
    }
    if (question_index != current.last_answered + 1) {
        return reject(ErrorCode::OutOfSequence,
                      "question " + std::to_string(question_index) + " cannot be answered now; the current question is " +
                          std::to_string(current.last_answered + 1),
                      true);
    }
    if (!raw) return reject(ErrorCode::MissingSelection, "please select one of the answers", true);
    if (*raw < kMinAnswer || *raw > kMaxAnswer) {
        return reject(ErrorCode::ValueOutOfRange, "answer value " + std::to_string(*raw) + " is not on the scale",
                      true);
    }

    int last = 0;
    try {
        std::optional<EvaluationSession> fresh;
        if (!session) fresh = current;
        last = store_.record_answer_and_advance(key, question_index, make_answer_value(*raw), now, total, fresh);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ConflictRetry) throw;
        if (auto reread = store_.find_session(key)) current = *reread;
        if (current.complete()) {
            return reject(ErrorCode::AlreadyCompleted, "this questionnaire has already been completed", false);
        }
        return reject(ErrorCode::OutOfSequence, "this question was already answered", true);
    }

    current.last_answered = last;
    if (last == total) {
        auto done = store_.find_session(key);
        return Completed{done && done->questionnaire_no ? *done->questionnaire_no : 0,
                         CompletedNotice{name, current.mode, {last, total}}};
    }
    return Accepted{view_for(*bank, current, name, std::nullopt)};
}

std::int64_t SessionEngine::reset_demo(const IpAddress& client_ip, const CampaignConfig& config) {
    authorize_reset(classify_access(client_ip, config));
    std::lock_guard lock(lock_for(client_ip.str()));
    return store_.purge_ip(client_ip.str());
}

} // namespace teacheval
