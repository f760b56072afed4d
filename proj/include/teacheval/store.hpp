#pragma once

#include "teacheval/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace teacheval {

struct TeacherEntry {
    Teacher teacher;
    bool hidden = false;
};

// One session as read back for the results plane, answers in index order.
struct StoredResult {
    EvaluationSession session;
    std::string teacher_display_name;
    std::vector<AnswerValue> answers;
};

struct ResultQuery {
    std::optional<std::string> teacher_id;
    bool include_demo = true;
    bool include_incomplete = false;
};

struct RespondentProgress {
    std::string client_ip;
    std::string teacher_id;
    SessionMode mode = SessionMode::Demo;
    int last_answered = 0;
    bool complete = false;
};

struct SessionCounts {
    std::int64_t official = 0;
    std::int64_t demo = 0;
    std::int64_t completed = 0;
    std::int64_t in_progress = 0;
};

struct StatusSnapshot {
    SessionCounts counts;
    std::vector<RespondentProgress> respondents;
    std::int64_t answer_records = 0;
    std::int64_t teachers = 0;
};

struct IntegrityReport {
    std::int64_t sessions_checked = 0;
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
};

struct ConfigAudit {
    Timestamp at{};
    std::string actor;
    std::string change;
};

// Storage boundary. Implementations must be safe to call from many threads
// and give snapshot-consistent reads.
class Store {
public:
    virtual ~Store() = default;

    virtual void upsert_teacher(const Teacher& t) = 0;
    virtual std::vector<TeacherEntry> list_teachers(bool include_hidden) const = 0;
    virtual std::optional<TeacherEntry> find_teacher(const std::string& id) const = 0;
    // Soft delete; returns false for an unknown id.
    virtual bool hide_teacher(const std::string& id) = 0;

    virtual std::optional<CampaignConfig> load_config() const = 0;
    virtual void save_config(const CampaignConfig& config, const std::string& actor,
                             const std::string& change, Timestamp now) = 0;
    virtual std::vector<ConfigAudit> config_audit() const = 0;

    virtual std::optional<EvaluationSession> find_session(const SessionKey& key) const = 0;
    // Inserts if absent; returns the stored session either way.
    virtual EvaluationSession create_session(const EvaluationSession& session) = 0;

    // Inserts the answer and advances last_answered in one transaction.
    // `fresh` describes the session to create when none exists yet.
    // Throws ConflictRetry when question_index != last_answered + 1 or the
    // answer row already exists.
    virtual int record_answer_and_advance(const SessionKey& key, int question_index,
                                          AnswerValue value, Timestamp now, int total,
                                          const std::optional<EvaluationSession>& fresh) = 0;

    virtual std::vector<AnswerRecord> answers_for(const SessionKey& key) const = 0;

    // Returns the number of answer records removed.
    virtual std::int64_t purge_ip(const std::string& client_ip) = 0;

    // Newest completion first; incomplete sessions (if requested) last.
    virtual std::vector<StoredResult> snapshot_results(const ResultQuery& query) const = 0;
    virtual std::optional<StoredResult> find_result(std::int64_t questionnaire_no) const = 0;

    virtual StatusSnapshot status() const = 0;
    virtual IntegrityReport integrity_scan(int total) const = 0;
};

} // namespace teacheval
