#pragma once

#include "teacheval/store.hpp"

#include <filesystem>
#include <functional>
#include <mutex>
#include <string_view>

struct sqlite3;

namespace teacheval {

inline constexpr int kSchemaVersion = 1;

// Single-file embedded store. One connection, writes serialized behind a
// mutex; every multi-statement operation runs inside one SQLite transaction.
class SqliteStore final : public Store {
public:
    // ":memory:" is accepted. Throws StorageFailure or SchemaMismatch.
    explicit SqliteStore(const std::filesystem::path& path);
    ~SqliteStore() override;

    SqliteStore(const SqliteStore&) = delete;
    SqliteStore& operator=(const SqliteStore&) = delete;

    // Test seam: invoked at named points inside write transactions.
    // Currently "answer_inserted" (between the answer insert and the
    // session update) and "purge_answers_deleted".
    using FaultHook = std::function<void(std::string_view point)>;
    void set_fault_hook(FaultHook hook);

    void upsert_teacher(const Teacher& t) override;
    std::vector<TeacherEntry> list_teachers(bool include_hidden) const override;
    std::optional<TeacherEntry> find_teacher(const std::string& id) const override;
    bool hide_teacher(const std::string& id) override;

    std::optional<CampaignConfig> load_config() const override;
    void save_config(const CampaignConfig& config, const std::string& actor,
                     const std::string& change, Timestamp now) override;
    std::vector<ConfigAudit> config_audit() const override;

    std::optional<EvaluationSession> find_session(const SessionKey& key) const override;
    EvaluationSession create_session(const EvaluationSession& session) override;

    int record_answer_and_advance(const SessionKey& key, int question_index, AnswerValue value,
                                  Timestamp now, int total,
                                  const std::optional<EvaluationSession>& fresh) override;

    std::vector<AnswerRecord> answers_for(const SessionKey& key) const override;
    std::int64_t purge_ip(const std::string& client_ip) override;

    std::vector<StoredResult> snapshot_results(const ResultQuery& query) const override;
    std::optional<StoredResult> find_result(std::int64_t questionnaire_no) const override;

    StatusSnapshot status() const override;
    IntegrityReport integrity_scan(int total) const override;

private:
    void fault(std::string_view point);

    sqlite3* db_ = nullptr;
    mutable std::mutex mu_;
    FaultHook hook_;
};

} // namespace teacheval
