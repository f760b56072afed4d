#include "teacheval/admin.hpp"

#include "teacheval/error.hpp"

#include <json.hpp>
#include <sodium.h>

namespace teacheval {

namespace {

void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) throw Error(ErrorCode::StorageFailure, "libsodium failed to initialise");
}

std::string random_hex(std::size_t bytes) {
    ensure_sodium();
    std::vector<unsigned char> buf(bytes);
    randombytes_buf(buf.data(), buf.size());
    std::string out(bytes * 2 + 1, '\0');
    sodium_bin2hex(out.data(), out.size(), buf.data(), buf.size());
    out.pop_back();
    return out;
}

std::string describe(const ParameterChange& change) {
    nlohmann::json j = nlohmann::json::object();
    if (change.active) j["active"] = *change.active;
    if (change.current_teacher) {
        j["current_teacher"] = *change.current_teacher ? nlohmann::json(**change.current_teacher) : nlohmann::json();
    }
    if (change.allowlist) j["allowlist"] = *change.allowlist;
    if (change.deadline_seconds) {
        j["deadline_seconds"] =
            *change.deadline_seconds ? nlohmann::json(**change.deadline_seconds) : nlohmann::json();
    }
    return j.dump();
}

} // namespace

std::string hash_password(std::string_view password, bool fast) {
    ensure_sodium();
    char out[crypto_pwhash_STRBYTES];
    auto ops = fast ? crypto_pwhash_OPSLIMIT_MIN : crypto_pwhash_OPSLIMIT_INTERACTIVE;
    auto mem = fast ? crypto_pwhash_MEMLIMIT_MIN : crypto_pwhash_MEMLIMIT_INTERACTIVE;
    if (crypto_pwhash_str(out, password.data(), password.size(), ops, mem) != 0) {
        throw Error(ErrorCode::StorageFailure, "password hashing ran out of memory");
    }
    return out;
}

bool verify_password(std::string_view password, const std::string& digest) {
    ensure_sodium();
    if (digest.empty()) return false;
    return crypto_pwhash_str_verify(digest.c_str(), password.data(), password.size()) == 0;
}

CampaignConfig bootstrap_config(Store& store, const std::optional<std::string>& admin_user,
                                const std::optional<std::string>& admin_pass_hash,
                                const std::optional<std::int64_t>& deadline_seconds, Timestamp now) {
    CampaignConfig config = store.load_config().value_or(CampaignConfig{});
    std::vector<std::string> changed;
    if (admin_user && *admin_user != config.admin_username) {
        config.admin_username = *admin_user;
        changed.push_back("admin_username");
    }
    if (admin_pass_hash && *admin_pass_hash != config.admin_password_hash) {
        config.admin_password_hash = *admin_pass_hash;
        changed.push_back("admin_password_hash");
    }
    if (deadline_seconds && deadline_seconds != config.deadline_seconds) {
        config.deadline_seconds = *deadline_seconds;
        changed.push_back("deadline_seconds");
    }
    if (!store.load_config() || !changed.empty()) {
        nlohmann::json j = changed;
        store.save_config(config, "startup", j.dump(), now);
    }
    return config;
}

AdminService::AdminService(Store& store, ConfigCell& config, const SessionEngine& engine,
                           std::chrono::seconds token_ttl, Clock clock)
    : store_(store), config_(config), engine_(engine), ttl_(token_ttl), clock_(std::move(clock)) {}

std::string AdminService::authenticate(const AdminCredential& cred) {
    ensure_sodium();
    auto config = config_.snapshot();
    // Always run the digest check so timing does not reveal which field was wrong.
    bool password_ok = verify_password(cred.password, config->admin_password_hash);
    const auto& expected = config->admin_username;
    bool user_ok = !expected.empty() && cred.username.size() == expected.size() &&
                   sodium_memcmp(cred.username.data(), expected.data(), expected.size()) == 0;
    if (!(password_ok && user_ok)) throw Error(ErrorCode::Unauthorized, "invalid username or password");

    auto token = random_hex(32);
    std::lock_guard lock(tokens_mu_);
    auto now = clock_();
    std::erase_if(tokens_, [&](const auto& kv) { return kv.second.expires <= now; });
    tokens_[token] = {cred.username, now + ttl_};
    return token;
}

std::string AdminService::require(const std::string& token) {
    std::lock_guard lock(tokens_mu_);
    auto it = tokens_.find(token);
    auto now = clock_();
    if (token.empty() || it == tokens_.end()) throw Error(ErrorCode::Unauthorized, "missing or unknown token");
    if (it->second.expires <= now) {
        tokens_.erase(it);
        throw Error(ErrorCode::Unauthorized, "token expired");
    }
    it->second.expires = now + ttl_;
    return it->second.username;
}

StatusReport AdminService::view_status(const std::string& token) {
    require(token);
    auto config = config_.snapshot();
    auto snap = store_.status();
    int total = engine_.bank()->size();
    auto integrity = store_.integrity_scan(total);

    StatusReport report;
    report.active = config->active;
    report.current_teacher_id = config->current_teacher;
    if (config->current_teacher) {
        auto t = store_.find_teacher(*config->current_teacher);
        report.current_teacher = t ? t->teacher.display_name : *config->current_teacher;
    }
    report.allowlist = config->allowlist;
    report.deadline_seconds = config->deadline_seconds;
    report.session_counts = snap.counts;
    for (const auto& r : snap.respondents) {
        report.respondent_locations.push_back({r.client_ip, r.teacher_id, r.mode, r.last_answered, total, r.complete});
    }
    report.health = {integrity.ok(), static_cast<std::int64_t>(integrity.violations.size()),
                     integrity.sessions_checked, snap.answer_records, snap.teachers, total};
    return report;
}

CampaignConfig AdminService::set_parameters(const std::string& token, const ParameterChange& change) {
    auto actor = require(token);
    std::lock_guard lock(config_mu_);
    CampaignConfig next = *config_.snapshot();
    if (change.active) next.active = *change.active;
    if (change.current_teacher) next.current_teacher = *change.current_teacher;
    if (change.allowlist) {
        next.allowlist.clear();
        for (const auto& entry : *change.allowlist) next.allowlist.insert(IpAddress::parse(entry).str());
    }
    if (change.deadline_seconds) next.deadline_seconds = *change.deadline_seconds;

    if (next.current_teacher && (change.current_teacher || (next.active && change.active))) {
        auto t = store_.find_teacher(*next.current_teacher);
        if (!t || t->hidden) {
            throw Error(ErrorCode::InvalidTeacher, "unknown teacher " + *next.current_teacher);
        }
    }
    validate_config(next);
    store_.save_config(next, actor, describe(change), clock_());
    config_.publish(next);
    return next;
}

Teacher AdminService::upsert_teacher(const std::string& token, Teacher teacher) {
    require(token);
    if (teacher.id.empty()) teacher.id = "t-" + random_hex(6);
    store_.upsert_teacher(teacher);
    return teacher;
}

std::vector<Teacher> AdminService::list_teachers(const std::string& token) {
    require(token);
    std::vector<Teacher> out;
    for (auto& entry : store_.list_teachers(false)) out.push_back(std::move(entry.teacher));
    return out;
}

void AdminService::remove_teacher(const std::string& token, const std::string& id) {
    require(token);
    std::lock_guard lock(config_mu_);
    auto config = config_.snapshot();
    if (config->active && config->current_teacher == id) {
        throw Error(ErrorCode::TeacherInUse, "teacher " + id + " is being evaluated");
    }
    if (!store_.hide_teacher(id)) throw Error(ErrorCode::NotFound, "no teacher " + id);
}

} // namespace teacheval
