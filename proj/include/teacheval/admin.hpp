#pragma once

#include "teacheval/engine.hpp"
#include "teacheval/store.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace teacheval {

// Salted Argon2id digest in libsodium's self-describing string form.
// `fast` uses the minimum cost parameters (tests only).
std::string hash_password(std::string_view password, bool fast = false);
bool verify_password(std::string_view password, const std::string& digest);

struct AdminCredential {
    std::string username;
    std::string password;
};

// Progress per respondent; deliberately carries no answer values.
struct RespondentStatus {
    std::string client_ip;
    std::string teacher_id;
    SessionMode mode = SessionMode::Demo;
    int answered = 0;
    int total = 0;
    bool complete = false;
};

struct StoreHealth {
    bool integrity_ok = true;
    std::int64_t violations = 0;
    std::int64_t sessions = 0;
    std::int64_t answer_records = 0;
    std::int64_t teachers = 0;
    int question_count = 0;
};

struct StatusReport {
    bool active = false;
    std::optional<std::string> current_teacher;
    std::optional<std::string> current_teacher_id;
    std::set<std::string> allowlist;
    std::optional<std::int64_t> deadline_seconds;
    SessionCounts session_counts;
    std::vector<RespondentStatus> respondent_locations;
    StoreHealth health;
};

// Absent fields are left unchanged; an inner nullopt clears the value.
struct ParameterChange {
    std::optional<bool> active;
    std::optional<std::optional<std::string>> current_teacher;
    std::optional<std::set<std::string>> allowlist;
    std::optional<std::optional<std::int64_t>> deadline_seconds;
};

// Loads the persisted campaign configuration, applying startup overrides for
// the admin credentials and deadline, and writes the result back.
CampaignConfig bootstrap_config(Store& store, const std::optional<std::string>& admin_user,
                                const std::optional<std::string>& admin_pass_hash,
                                const std::optional<std::int64_t>& deadline_seconds, Timestamp now);

class AdminService {
public:
    using Clock = std::function<Timestamp()>;

    AdminService(Store& store, ConfigCell& config, const SessionEngine& engine,
                 std::chrono::seconds token_ttl = std::chrono::minutes(30), Clock clock = now_utc);

    // Same Unauthorized error for a wrong user or a wrong password.
    std::string authenticate(const AdminCredential& cred);

    StatusReport view_status(const std::string& token);
    CampaignConfig set_parameters(const std::string& token, const ParameterChange& change);

    // An empty id gets a generated one. Returns the stored teacher.
    Teacher upsert_teacher(const std::string& token, Teacher teacher);
    std::vector<Teacher> list_teachers(const std::string& token);
    // Hides from selection; stored results keep the teacher.
    void remove_teacher(const std::string& token, const std::string& id);

    // Throws Unauthorized; refreshes the sliding expiry. Returns the username.
    std::string require(const std::string& token);

private:
    struct TokenState {
        std::string username;
        Timestamp expires{};
    };

    Store& store_;
    ConfigCell& config_;
    const SessionEngine& engine_;
    std::chrono::seconds ttl_;
    Clock clock_;

    std::mutex tokens_mu_;
    std::map<std::string, TokenState> tokens_;
    // Serializes config read-modify-write.
    std::mutex config_mu_;
};

} // namespace teacheval
