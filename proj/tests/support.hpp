#pragma once

#include "teacheval/bank.hpp"
#include "teacheval/engine.hpp"
#include "teacheval/sqlite_store.hpp"

#include <sqlite3.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <random>
#include <string>
#include <unistd.h>

namespace teacheval::testing {

// Inverse every `inverse_every`-th item (0: all direct).
inline std::shared_ptr<const QuestionBank> make_bank(int n, int inverse_every = 4) {
    std::vector<Question> items;
    for (int i = 1; i <= n; ++i) {
        items.push_back({i, "Item " + std::to_string(i),
                         inverse_every > 0 && i % inverse_every == 0 ? Direction::Inverse : Direction::Direct});
    }
    return std::make_shared<const QuestionBank>(validate_question_bank(std::move(items), n));
}

inline std::filesystem::path source_dir() {
    return TEACHEVAL_SOURCE_DIR;
}

// Unique scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() /
                ("teacheval-" + std::to_string(::getpid()) + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline CampaignConfig active_config(const std::string& teacher, std::set<std::string> allowlist = {}) {
    CampaignConfig c;
    c.active = true;
    c.current_teacher = teacher;
    c.allowlist = std::move(allowlist);
    return c;
}

// Runs raw SQL against a store file behind the store's back (fault setup).
inline void raw_sql(const std::filesystem::path& db_path, const std::string& sql) {
    sqlite3* db = nullptr;
    sqlite3_open(db_path.c_str(), &db);
    sqlite3_exec(db, "PRAGMA foreign_keys = OFF", nullptr, nullptr, nullptr);
    char* err = nullptr;
    int rc = sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err);
    std::string msg = err ? err : "";
    sqlite3_free(err);
    sqlite3_close(db);
    if (rc != SQLITE_OK) throw std::runtime_error("raw_sql: " + msg);
}

// Logical dump of every table, for state-equality checks.
inline std::string dump_store(const std::filesystem::path& db_path) {
    sqlite3* db = nullptr;
    sqlite3_open_v2(db_path.c_str(), &db, SQLITE_OPEN_READONLY, nullptr);
    std::string out;
    for (const char* sql : {"SELECT * FROM teachers ORDER BY 1", "SELECT * FROM config",
                            "SELECT * FROM sessions ORDER BY 1, 2", "SELECT * FROM answers ORDER BY 1, 2, 3",
                            "SELECT * FROM config_audit ORDER BY 1"}) {
        sqlite3_stmt* st = nullptr;
        sqlite3_prepare_v2(db, sql, -1, &st, nullptr);
        while (sqlite3_step(st) == SQLITE_ROW) {
            for (int c = 0; c < sqlite3_column_count(st); ++c) {
                auto* t = sqlite3_column_text(st, c);
                out += t ? reinterpret_cast<const char*>(t) : "NULL";
                out += '|';
            }
            out += '\n';
        }
        sqlite3_finalize(st);
        out += "--\n";
    }
    sqlite3_close(db);
    return out;
}

// Brute-force reference for the sequential-answer protocol: accepts a
// submission only when it is exactly the next index with a value in 1..5.
struct ReferenceModel {
    int total;
    std::vector<int> answers;

    void submit(int index, std::optional<int> raw) {
        int last = static_cast<int>(answers.size());
        if (last < total && index == last + 1 && raw && *raw >= 1 && *raw <= 5) answers.push_back(*raw);
    }
    int last() const { return static_cast<int>(answers.size()); }
};

} // namespace teacheval::testing
