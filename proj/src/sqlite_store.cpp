#include "teacheval/sqlite_store.hpp"

#include "teacheval/error.hpp"

#include <json.hpp>
#include <sqlite3.h>

#include <map>
#include <set>

namespace teacheval {

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE teachers (
    id           TEXT PRIMARY KEY,
    display_name TEXT NOT NULL CHECK (display_name <> ''),
    hidden       INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE config (
    id                  INTEGER PRIMARY KEY CHECK (id = 1),
    active              INTEGER NOT NULL,
    current_teacher     TEXT REFERENCES teachers(id),
    allowlist           TEXT NOT NULL,
    deadline_seconds    INTEGER,
    admin_username      TEXT NOT NULL,
    admin_password_hash TEXT NOT NULL
);
CREATE TABLE config_audit (
    id     INTEGER PRIMARY KEY AUTOINCREMENT,
    at     INTEGER NOT NULL,
    actor  TEXT NOT NULL,
    change TEXT NOT NULL
);
CREATE TABLE sessions (
    client_ip        TEXT NOT NULL,
    teacher_id       TEXT NOT NULL REFERENCES teachers(id),
    last_answered    INTEGER NOT NULL CHECK (last_answered >= 0),
    mode             TEXT NOT NULL CHECK (mode IN ('official', 'demo')),
    started_at       INTEGER NOT NULL,
    completed_at     INTEGER,
    questionnaire_no INTEGER UNIQUE,
    PRIMARY KEY (client_ip, teacher_id)
);
CREATE TABLE answers (
    client_ip      TEXT NOT NULL,
    teacher_id     TEXT NOT NULL,
    question_index INTEGER NOT NULL CHECK (question_index >= 1),
    value          INTEGER NOT NULL CHECK (value BETWEEN 1 AND 5),
    answered_at    INTEGER NOT NULL,
    PRIMARY KEY (client_ip, teacher_id, question_index),
    FOREIGN KEY (client_ip, teacher_id) REFERENCES sessions(client_ip, teacher_id)
);
)sql";

[[noreturn]] void fail(sqlite3* db, const std::string& what) {
    throw Error(ErrorCode::StorageFailure, what + ": " + (db ? sqlite3_errmsg(db) : "no database"));
}

class Statement {
public:
    Statement(sqlite3* db, const char* sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) fail(db, "prepare");
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    Statement& bind(int i, const std::string& v) {
        sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
        return *this;
    }
    Statement& bind(int i, std::int64_t v) {
        sqlite3_bind_int64(stmt_, i, v);
        return *this;
    }
    Statement& bind(int i, int v) { return bind(i, static_cast<std::int64_t>(v)); }
    Statement& bind(int i, bool v) { return bind(i, static_cast<std::int64_t>(v ? 1 : 0)); }
    Statement& bind_null(int i) {
        sqlite3_bind_null(stmt_, i);
        return *this;
    }
    template <typename T>
    Statement& bind(int i, const std::optional<T>& v) {
        return v ? bind(i, *v) : bind_null(i);
    }

    // True while a row is available.
    bool step() {
        int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        if (rc == SQLITE_CONSTRAINT) {
            throw Error(ErrorCode::ConflictRetry, std::string("constraint: ") + sqlite3_errmsg(db_));
        }
        fail(db_, "step");
    }
    void run() {
        while (step()) {
        }
    }

    bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }
    std::int64_t i64(int col) const { return sqlite3_column_int64(stmt_, col); }
    int i32(int col) const { return sqlite3_column_int(stmt_, col); }
    std::string text(int col) const {
        auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
        return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
    }
    std::optional<std::int64_t> opt_i64(int col) const {
        return is_null(col) ? std::nullopt : std::optional<std::int64_t>(i64(col));
    }

private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown";
        sqlite3_free(err);
        throw Error(ErrorCode::StorageFailure, std::string("exec: ") + msg);
    }
}

// Rolls back unless commit() was reached.
class Transaction {
public:
    Transaction(sqlite3* db, bool write) : db_(db) {
        exec(db_, write ? "BEGIN IMMEDIATE" : "BEGIN");
    }
    ~Transaction() {
        if (!done_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
    }
    Transaction(const Transaction&) = delete;
    Transaction& operator=(const Transaction&) = delete;

    void commit() {
        exec(db_, "COMMIT");
        done_ = true;
    }

private:
    sqlite3* db_;
    bool done_ = false;
};

constexpr const char* kSessionColumns =
    "client_ip, teacher_id, last_answered, mode, started_at, completed_at, questionnaire_no";

EvaluationSession read_session(const Statement& st, int base = 0) {
    EvaluationSession s;
    s.key.client_ip = st.text(base + 0);
    s.key.teacher_id = st.text(base + 1);
    s.last_answered = st.i32(base + 2);
    s.mode = parse_mode(st.text(base + 3)).value_or(SessionMode::Demo);
    s.started_at = from_unix(st.i64(base + 4));
    if (auto c = st.opt_i64(base + 5)) s.completed_at = from_unix(*c);
    s.questionnaire_no = st.opt_i64(base + 6);
    return s;
}

std::optional<EvaluationSession> query_session(sqlite3* db, const SessionKey& key) {
    std::string sql = std::string("SELECT ") + kSessionColumns +
                      " FROM sessions WHERE client_ip = ?1 AND teacher_id = ?2";
    Statement st(db, sql.c_str());
    st.bind(1, key.client_ip).bind(2, key.teacher_id);
    if (!st.step()) return std::nullopt;
    return read_session(st);
}

void insert_session(sqlite3* db, const EvaluationSession& s) {
    Statement st(db,
                 "INSERT INTO sessions (client_ip, teacher_id, last_answered, mode, started_at, "
                 "completed_at, questionnaire_no) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)");
    st.bind(1, s.key.client_ip)
        .bind(2, s.key.teacher_id)
        .bind(3, s.last_answered)
        .bind(4, std::string(mode_name(s.mode)))
        .bind(5, to_unix(s.started_at));
    if (s.completed_at) st.bind(6, to_unix(*s.completed_at));
    else st.bind_null(6);
    st.bind(7, s.questionnaire_no);
    st.run();
}

std::vector<AnswerValue> query_answer_values(sqlite3* db, const SessionKey& key) {
    Statement st(db,
                 "SELECT value FROM answers WHERE client_ip = ?1 AND teacher_id = ?2 "
                 "ORDER BY question_index");
    st.bind(1, key.client_ip).bind(2, key.teacher_id);
    std::vector<AnswerValue> out;
    while (st.step()) out.push_back(make_answer_value(st.i32(0)));
    return out;
}

} // namespace

SqliteStore::SqliteStore(const std::filesystem::path& path) {
    int rc = sqlite3_open_v2(path.c_str(), &db_,
                             SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX, nullptr);
    if (rc != SQLITE_OK) {
        std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        db_ = nullptr;
        throw Error(ErrorCode::StorageFailure, "open " + path.string() + ": " + msg);
    }
    try {
        sqlite3_busy_timeout(db_, 5000);
        exec(db_, "PRAGMA foreign_keys = ON");
        if (path != ":memory:") exec(db_, "PRAGMA journal_mode = WAL");
        exec(db_, "PRAGMA synchronous = FULL");

        Statement ver(db_, "PRAGMA user_version");
        ver.step();
        int version = ver.i32(0);
        if (version == 0) {
            Transaction tx(db_, true);
            exec(db_, kSchema);
            exec(db_, ("PRAGMA user_version = " + std::to_string(kSchemaVersion)).c_str());
            tx.commit();
        } else if (version != kSchemaVersion) {
            throw Error(ErrorCode::SchemaMismatch, "store schema version " + std::to_string(version) +
                                                       ", expected " + std::to_string(kSchemaVersion));
        }
    } catch (...) {
        sqlite3_close(db_);
        db_ = nullptr;
        throw;
    }
}

SqliteStore::~SqliteStore() {
    sqlite3_close(db_);
}

void SqliteStore::set_fault_hook(FaultHook hook) {
    std::lock_guard lock(mu_);
    hook_ = std::move(hook);
}

void SqliteStore::fault(std::string_view point) {
    if (hook_) hook_(point);
}

void SqliteStore::upsert_teacher(const Teacher& t) {
    validate_teacher(t);
    std::lock_guard lock(mu_);
    Statement st(db_,
                 "INSERT INTO teachers (id, display_name, hidden) VALUES (?1, ?2, 0) "
                 "ON CONFLICT(id) DO UPDATE SET display_name = excluded.display_name, hidden = 0");
    st.bind(1, t.id).bind(2, t.display_name).run();
}

std::vector<TeacherEntry> SqliteStore::list_teachers(bool include_hidden) const {
    std::lock_guard lock(mu_);
    Statement st(db_, include_hidden
                          ? "SELECT id, display_name, hidden FROM teachers ORDER BY display_name, id"
                          : "SELECT id, display_name, hidden FROM teachers WHERE hidden = 0 "
                            "ORDER BY display_name, id");
    std::vector<TeacherEntry> out;
    while (st.step()) out.push_back({{st.text(0), st.text(1)}, st.i32(2) != 0});
    return out;
}

std::optional<TeacherEntry> SqliteStore::find_teacher(const std::string& id) const {
    std::lock_guard lock(mu_);
    Statement st(db_, "SELECT id, display_name, hidden FROM teachers WHERE id = ?1");
    st.bind(1, id);
    if (!st.step()) return std::nullopt;
    return TeacherEntry{{st.text(0), st.text(1)}, st.i32(2) != 0};
}

bool SqliteStore::hide_teacher(const std::string& id) {
    std::lock_guard lock(mu_);
    Statement st(db_, "UPDATE teachers SET hidden = 1 WHERE id = ?1");
    st.bind(1, id).run();
    return sqlite3_changes(db_) > 0;
}

std::optional<CampaignConfig> SqliteStore::load_config() const {
    std::lock_guard lock(mu_);
    Statement st(db_,
                 "SELECT active, current_teacher, allowlist, deadline_seconds, admin_username, "
                 "admin_password_hash FROM config WHERE id = 1");
    if (!st.step()) return std::nullopt;
    CampaignConfig c;
    c.active = st.i32(0) != 0;
    if (!st.is_null(1)) c.current_teacher = st.text(1);
    try {
        for (const auto& ip : nlohmann::json::parse(st.text(2))) c.allowlist.insert(ip.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::StorageFailure, std::string("stored allowlist: ") + e.what());
    }
    c.deadline_seconds = st.opt_i64(3);
    c.admin_username = st.text(4);
    c.admin_password_hash = st.text(5);
    return c;
}

void SqliteStore::save_config(const CampaignConfig& config, const std::string& actor,
                              const std::string& change, Timestamp now) {
    validate_config(config);
    std::lock_guard lock(mu_);
    Transaction tx(db_, true);
    Statement st(db_,
                 "INSERT INTO config (id, active, current_teacher, allowlist, deadline_seconds, "
                 "admin_username, admin_password_hash) VALUES (1, ?1, ?2, ?3, ?4, ?5, ?6) "
                 "ON CONFLICT(id) DO UPDATE SET active = excluded.active, "
                 "current_teacher = excluded.current_teacher, allowlist = excluded.allowlist, "
                 "deadline_seconds = excluded.deadline_seconds, admin_username = excluded.admin_username, "
                 "admin_password_hash = excluded.admin_password_hash");
    nlohmann::json allow = nlohmann::json::array();
    for (const auto& ip : config.allowlist) allow.push_back(ip);
    st.bind(1, config.active)
        .bind(2, config.current_teacher)
        .bind(3, allow.dump())
        .bind(4, config.deadline_seconds)
        .bind(5, config.admin_username)
        .bind(6, config.admin_password_hash);
    try {
        st.run();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConflictRetry) {
            throw Error(ErrorCode::InvalidTeacher, "current teacher is not in the roster");
        }
        throw;
    }
    Statement audit(db_, "INSERT INTO config_audit (at, actor, change) VALUES (?1, ?2, ?3)");
    audit.bind(1, to_unix(now)).bind(2, actor).bind(3, change).run();
    tx.commit();
}

std::vector<ConfigAudit> SqliteStore::config_audit() const {
    std::lock_guard lock(mu_);
    Statement st(db_, "SELECT at, actor, change FROM config_audit ORDER BY id");
    std::vector<ConfigAudit> out;
    while (st.step()) out.push_back({from_unix(st.i64(0)), st.text(1), st.text(2)});
    return out;
}

std::optional<EvaluationSession> SqliteStore::find_session(const SessionKey& key) const {
    std::lock_guard lock(mu_);
    return query_session(db_, key);
}

EvaluationSession SqliteStore::create_session(const EvaluationSession& session) {
    if (session.mode == SessionMode::Closed) {
        throw Error(ErrorCode::SessionClosed, "closed sessions are never persisted");
    }
    std::lock_guard lock(mu_);
    Transaction tx(db_, true);
    if (auto existing = query_session(db_, session.key)) return *existing;
    EvaluationSession fresh = session;
    fresh.last_answered = 0;
    fresh.completed_at.reset();
    fresh.questionnaire_no.reset();
    insert_session(db_, fresh);
    tx.commit();
    return fresh;
}

int SqliteStore::record_answer_and_advance(const SessionKey& key, int question_index, AnswerValue value,
                                           Timestamp now, int total,
                                           const std::optional<EvaluationSession>& fresh) {
    std::lock_guard lock(mu_);
    Transaction tx(db_, true);

    auto session = query_session(db_, key);
    if (!session) {
        if (!fresh || question_index != 1) {
            throw Error(ErrorCode::ConflictRetry, "no session for answer " + std::to_string(question_index));
        }
        EvaluationSession s = *fresh;
        s.key = key;
        s.last_answered = 0;
        s.completed_at.reset();
        s.questionnaire_no.reset();
        insert_session(db_, s);
        session = s;
    }
    if (session->complete() || session->last_answered + 1 != question_index || question_index > total) {
        throw Error(ErrorCode::ConflictRetry, "answer " + std::to_string(question_index) +
                                                  " does not follow " + std::to_string(session->last_answered));
    }

    Statement ins(db_,
                  "INSERT INTO answers (client_ip, teacher_id, question_index, value, answered_at) "
                  "VALUES (?1, ?2, ?3, ?4, ?5)");
    ins.bind(1, key.client_ip).bind(2, key.teacher_id).bind(3, question_index).bind(4, value.raw()).bind(5, to_unix(now));
    ins.run();

    fault("answer_inserted");

    if (question_index == total) {
        Statement upd(db_,
                      "UPDATE sessions SET last_answered = ?3, completed_at = ?4, "
                      "questionnaire_no = (SELECT COALESCE(MAX(questionnaire_no), 0) + 1 FROM sessions) "
                      "WHERE client_ip = ?1 AND teacher_id = ?2 AND last_answered = ?5");
        upd.bind(1, key.client_ip).bind(2, key.teacher_id).bind(3, question_index).bind(4, to_unix(now))
            .bind(5, question_index - 1);
        upd.run();
    } else {
        Statement upd(db_,
                      "UPDATE sessions SET last_answered = ?3 "
                      "WHERE client_ip = ?1 AND teacher_id = ?2 AND last_answered = ?4");
        upd.bind(1, key.client_ip).bind(2, key.teacher_id).bind(3, question_index).bind(4, question_index - 1);
        upd.run();
    }
    if (sqlite3_changes(db_) != 1) {
        throw Error(ErrorCode::ConflictRetry, "session advanced concurrently");
    }
    tx.commit();
    return question_index;
}

std::vector<AnswerRecord> SqliteStore::answers_for(const SessionKey& key) const {
    std::lock_guard lock(mu_);
    Statement st(db_,
                 "SELECT question_index, value, answered_at FROM answers "
                 "WHERE client_ip = ?1 AND teacher_id = ?2 ORDER BY question_index");
    st.bind(1, key.client_ip).bind(2, key.teacher_id);
    std::vector<AnswerRecord> out;
    while (st.step()) {
        out.push_back({key, st.i32(0), make_answer_value(st.i32(1)), from_unix(st.i64(2))});
    }
    return out;
}

std::int64_t SqliteStore::purge_ip(const std::string& client_ip) {
    std::lock_guard lock(mu_);
    Transaction tx(db_, true);
    Statement del_answers(db_, "DELETE FROM answers WHERE client_ip = ?1");
    del_answers.bind(1, client_ip).run();
    std::int64_t removed = sqlite3_changes(db_);
    fault("purge_answers_deleted");
    Statement del_sessions(db_, "DELETE FROM sessions WHERE client_ip = ?1");
    del_sessions.bind(1, client_ip).run();
    tx.commit();
    return removed;
}

std::vector<StoredResult> SqliteStore::snapshot_results(const ResultQuery& query) const {
    std::lock_guard lock(mu_);
    Transaction tx(db_, false);
    std::string sql = "SELECT s.client_ip, s.teacher_id, s.last_answered, s.mode, s.started_at, "
                      "s.completed_at, s.questionnaire_no, t.display_name "
                      "FROM sessions s JOIN teachers t ON t.id = s.teacher_id WHERE 1 = 1";
    if (query.teacher_id) sql += " AND s.teacher_id = ?1";
    if (!query.include_demo) sql += " AND s.mode = 'official'";
    if (!query.include_incomplete) sql += " AND s.completed_at IS NOT NULL";
    sql += " ORDER BY s.completed_at IS NULL, s.completed_at DESC, s.questionnaire_no DESC, s.started_at DESC";
    Statement st(db_, sql.c_str());
    if (query.teacher_id) st.bind(1, *query.teacher_id);
    std::vector<StoredResult> out;
    while (st.step()) {
        StoredResult r;
        r.session = read_session(st);
        r.teacher_display_name = st.text(7);
        out.push_back(std::move(r));
    }
    for (auto& r : out) r.answers = query_answer_values(db_, r.session.key);
    tx.commit();
    return out;
}

std::optional<StoredResult> SqliteStore::find_result(std::int64_t questionnaire_no) const {
    std::lock_guard lock(mu_);
    Transaction tx(db_, false);
    Statement st(db_,
                 "SELECT s.client_ip, s.teacher_id, s.last_answered, s.mode, s.started_at, "
                 "s.completed_at, s.questionnaire_no, t.display_name "
                 "FROM sessions s JOIN teachers t ON t.id = s.teacher_id WHERE s.questionnaire_no = ?1");
    st.bind(1, questionnaire_no);
    if (!st.step()) return std::nullopt;
    StoredResult r;
    r.session = read_session(st);
    r.teacher_display_name = st.text(7);
    r.answers = query_answer_values(db_, r.session.key);
    tx.commit();
    return r;
}

StatusSnapshot SqliteStore::status() const {
    std::lock_guard lock(mu_);
    Transaction tx(db_, false);
    StatusSnapshot snap;
    std::string sql = std::string("SELECT ") + kSessionColumns + " FROM sessions ORDER BY started_at, client_ip";
    Statement st(db_, sql.c_str());
    while (st.step()) {
        auto s = read_session(st);
        (s.mode == SessionMode::Official ? snap.counts.official : snap.counts.demo)++;
        (s.complete() ? snap.counts.completed : snap.counts.in_progress)++;
        snap.respondents.push_back({s.key.client_ip, s.key.teacher_id, s.mode, s.last_answered, s.complete()});
    }
    Statement answers(db_, "SELECT COUNT(*) FROM answers");
    answers.step();
    snap.answer_records = answers.i64(0);
    Statement teachers(db_, "SELECT COUNT(*) FROM teachers WHERE hidden = 0");
    teachers.step();
    snap.teachers = teachers.i64(0);
    tx.commit();
    return snap;
}

IntegrityReport SqliteStore::integrity_scan(int total) const {
    std::lock_guard lock(mu_);
    Transaction tx(db_, false);
    IntegrityReport report;

    {
        Statement check(db_, "PRAGMA integrity_check");
        while (check.step()) {
            auto line = check.text(0);
            if (line != "ok") report.violations.push_back("sqlite: " + line);
        }
    }

    std::map<SessionKey, std::vector<int>> indices;
    {
        Statement st(db_, "SELECT client_ip, teacher_id, question_index FROM answers ORDER BY 1, 2, 3");
        while (st.step()) indices[{st.text(0), st.text(1)}].push_back(st.i32(2));
    }

    std::set<std::int64_t> numbers;
    std::string sql = std::string("SELECT ") + kSessionColumns + " FROM sessions";
    Statement st(db_, sql.c_str());
    while (st.step()) {
        auto s = read_session(st);
        ++report.sessions_checked;
        std::string who = s.key.client_ip + "/" + s.key.teacher_id;
        if (s.last_answered < 0 || s.last_answered > total) {
            report.violations.push_back(who + ": last_answered " + std::to_string(s.last_answered) +
                                        " outside 0.." + std::to_string(total));
        }
        if (s.complete() != (s.last_answered == total)) {
            report.violations.push_back(who + ": completed_at inconsistent with last_answered");
        }
        if (s.complete() != s.questionnaire_no.has_value()) {
            report.violations.push_back(who + ": questionnaire number inconsistent with completion");
        }
        if (s.questionnaire_no && !numbers.insert(*s.questionnaire_no).second) {
            report.violations.push_back(who + ": duplicate questionnaire number");
        }
        auto found = indices.find(s.key);
        std::vector<int> got = found == indices.end() ? std::vector<int>{} : found->second;
        if (found != indices.end()) indices.erase(found);
        bool contiguous = static_cast<int>(got.size()) == s.last_answered;
        for (std::size_t i = 0; contiguous && i < got.size(); ++i) {
            contiguous = got[i] == static_cast<int>(i) + 1;
        }
        if (!contiguous) {
            report.violations.push_back(who + ": answers are not exactly 1.." + std::to_string(s.last_answered));
        }
    }
    for (const auto& [key, idx] : indices) {
        report.violations.push_back(key.client_ip + "/" + key.teacher_id + ": " + std::to_string(idx.size()) +
                                    " orphaned answers");
    }
    {
        Statement orphans(db_,
                          "SELECT COUNT(*) FROM sessions s LEFT JOIN teachers t ON t.id = s.teacher_id "
                          "WHERE t.id IS NULL");
        orphans.step();
        if (orphans.i64(0) != 0) {
            report.violations.push_back(std::to_string(orphans.i64(0)) + " sessions reference unknown teachers");
        }
    }
    tx.commit();
    return report;
}

} // namespace teacheval
