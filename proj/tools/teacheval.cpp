// Command-line entry point: HTTP server plus store maintenance commands.

#include "teacheval/admin.hpp"
#include "teacheval/bank.hpp"
#include "teacheval/engine.hpp"
#include "teacheval/error.hpp"
#include "teacheval/http_api.hpp"
#include "teacheval/scoring.hpp"
#include "teacheval/sqlite_store.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <fstream>
#include <iostream>

namespace {

httplib::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

int question_count_for(const std::string& questions_file, int count) {
    return teacheval::load_question_bank(questions_file, count).size();
}

} // namespace

int main(int argc, char** argv) {
    using namespace teacheval;

    CLI::App app{"Teaching-staff evaluation questionnaire service"};
    app.require_subcommand(1);

    std::string store_path = "teacheval.db";
    std::string questions_file = "data/questions.json";
    int question_count = kDefaultQuestionCount;

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    int port = 8080;
    std::string host = "0.0.0.0";
    std::optional<std::string> admin_user;
    std::optional<std::string> admin_pass_hash;
    bool trust_proxy = false;
    std::optional<std::int64_t> deadline;
    std::string static_dir = "web/dist";
    serve->add_option("--port", port, "Listening port")->capture_default_str();
    serve->add_option("--host", host, "Listening address")->capture_default_str();
    serve->add_option("--store-path", store_path, "Store file")->capture_default_str();
    serve->add_option("--questions-file", questions_file, "Question bank (JSON array)")->capture_default_str();
    serve->add_option("--question-count", question_count, "Expected questionnaire length")->capture_default_str();
    serve->add_option("--admin-user", admin_user, "Admin username")->envname("TEACHEVAL_ADMIN_USER");
    serve->add_option("--admin-pass-hash", admin_pass_hash, "Admin password digest (see hash-password)")
        ->envname("TEACHEVAL_ADMIN_PASS_HASH");
    serve->add_flag("--trust-proxy-header", trust_proxy, "Use X-Forwarded-For as the client address");
    serve->add_option("--deadline-seconds", deadline, "Session completion budget")->check(CLI::PositiveNumber);
    serve->add_option("--static-dir", static_dir, "Frontend assets served at /")->capture_default_str();

    auto* scan = app.add_subcommand("integrity-scan", "Check that every session's answers are contiguous");
    scan->add_option("--store-path", store_path, "Store file")->capture_default_str();
    scan->add_option("--questions-file", questions_file, "Question bank (JSON array)")->capture_default_str();
    scan->add_option("--question-count", question_count, "Expected questionnaire length")->capture_default_str();

    auto* exp = app.add_subcommand("export-results", "Write completed questionnaires as a tab-separated table");
    std::optional<std::string> teacher;
    bool include_demo = false;
    std::string output = "-";
    exp->add_option("--store-path", store_path, "Store file")->capture_default_str();
    exp->add_option("--questions-file", questions_file, "Question bank (JSON array)")->capture_default_str();
    exp->add_option("--question-count", question_count, "Expected questionnaire length")->capture_default_str();
    exp->add_option("--teacher", teacher, "Only this teacher id");
    exp->add_flag("--include-demo", include_demo, "Include demo questionnaires");
    exp->add_option("-o,--output", output, "Output file, - for stdout")->capture_default_str();

    auto* hash = app.add_subcommand("hash-password", "Print a salted digest for --admin-pass-hash");
    std::optional<std::string> password;
    hash->add_option("--password", password, "Password (read from stdin when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*hash) {
            std::string pw;
            if (password) pw = *password;
            else std::getline(std::cin, pw);
            std::cout << hash_password(pw) << '\n';
            return 0;
        }

        if (*scan) {
            SqliteStore store(store_path);
            int total = question_count_for(questions_file, question_count);
            auto report = store.integrity_scan(total);
            for (const auto& v : report.violations) std::cout << "violation: " << v << '\n';
            std::cout << report.sessions_checked << " sessions checked, " << report.violations.size()
                      << " violations\n";
            return report.ok() ? 0 : 1;
        }

        if (*exp) {
            SqliteStore store(store_path);
            auto bank = load_question_bank(questions_file, question_count);
            auto text = export_results_tsv(list_results(store, bank, teacher, include_demo), bank.size());
            if (output == "-") {
                std::cout << text;
            } else {
                std::ofstream out(output);
                out << text;
                if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + output);
            }
            return 0;
        }

        SqliteStore store(store_path);
        auto bank = std::make_shared<const QuestionBank>(load_question_bank(questions_file, question_count));
        ConfigCell config(bootstrap_config(store, admin_user, admin_pass_hash, deadline, now_utc()));
        if (config.snapshot()->admin_username.empty() || config.snapshot()->admin_password_hash.empty()) {
            std::cerr << "warning: no admin credentials configured; the admin plane is unreachable\n";
        }
        SessionEngine engine(store, bank);
        AdminService admin(store, config, engine);
        ApiOptions options;
        options.trust_proxy_header = trust_proxy;
        options.static_dir = static_dir;
        options.questions_file = questions_file;
        HttpApi api(store, config, engine, admin, options);

        httplib::Server server;
        api.mount(server);
        g_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cerr << "listening on " << host << ':' << port << " (" << bank->size() << " questions)\n";
        if (!server.listen(host, port)) {
            std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
            return 1;
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
        return 2;
    }
}
