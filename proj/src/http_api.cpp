#include "teacheval/http_api.hpp"

#include "teacheval/scoring.hpp"

#include <httplib.h>
#include <json.hpp>

namespace teacheval {

using nlohmann::json;

namespace {

json to_json(const Question& q) {
    return {{"index", q.index}, {"text", q.text}, {"direction", direction_name(q.direction)}};
}

json to_json(const Progress& p) {
    return {{"answered", p.answered}, {"total", p.total}};
}

json view_json(const QuestionView& v) {
    json j = {{"state", "question"},
              {"session_mode", mode_name(v.mode)},
              {"teacher", {{"id", v.teacher_id}, {"display_name", v.teacher_display_name}}},
              {"progress", to_json(v.progress)},
              {"question", to_json(v.question)}};
    j["status_message"] = v.status_message ? json(*v.status_message) : json();
    return j;
}

json notice_json(const char* state, const std::string& teacher, SessionMode mode, const Progress& p) {
    return {{"state", state},
            {"session_mode", mode_name(mode)},
            {"teacher", {{"display_name", teacher}}},
            {"progress", to_json(p)}};
}

json error_json(ErrorCode code, const std::string& message) {
    return {{"error", {{"code", error_code_name(code)}, {"message", message}}}};
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message, int status = 0) {
    send_json(res, status ? status : http_status_for(code), error_json(code, message));
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        auto j = json::parse(req.body);
        if (!j.is_object()) throw Error(ErrorCode::BadRequest, "request body must be a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadRequest, std::string("malformed JSON: ") + e.what());
    }
}

std::string bearer_token(const httplib::Request& req) {
    auto h = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (h.size() > prefix.size() && h.compare(0, prefix.size(), prefix) == 0) return h.substr(prefix.size());
    return {};
}

json status_json(const StatusReport& r) {
    json respondents = json::array();
    for (const auto& p : r.respondent_locations) {
        respondents.push_back({{"client_ip", p.client_ip},
                               {"teacher_id", p.teacher_id},
                               {"mode", mode_name(p.mode)},
                               {"answered", p.answered},
                               {"total", p.total},
                               {"complete", p.complete}});
    }
    return {{"active", r.active},
            {"current_teacher", r.current_teacher ? json(*r.current_teacher) : json()},
            {"current_teacher_id", r.current_teacher_id ? json(*r.current_teacher_id) : json()},
            {"allowlist", r.allowlist},
            {"deadline_seconds", r.deadline_seconds ? json(*r.deadline_seconds) : json()},
            {"session_counts",
             {{"official", r.session_counts.official},
              {"demo", r.session_counts.demo},
              {"completed", r.session_counts.completed},
              {"in_progress", r.session_counts.in_progress}}},
            {"respondent_locations", respondents},
            {"store_health",
             {{"integrity_ok", r.health.integrity_ok},
              {"violations", r.health.violations},
              {"sessions", r.health.sessions},
              {"answer_records", r.health.answer_records},
              {"teachers", r.health.teachers},
              {"question_count", r.health.question_count}}}};
}

json config_json(const CampaignConfig& c) {
    return {{"active", c.active},
            {"current_teacher", c.current_teacher ? json(*c.current_teacher) : json()},
            {"allowlist", c.allowlist},
            {"deadline_seconds", c.deadline_seconds ? json(*c.deadline_seconds) : json()}};
}

json row_json(const ResultRow& r) {
    return {{"questionnaire_no", r.questionnaire_no},
            {"demo", r.demo},
            {"completed_at", to_iso8601(r.completed_at)},
            {"teacher", {{"id", r.teacher_id}, {"display_name", r.teacher_display_name}}},
            {"raw_answers", r.raw_answers},
            {"scored_answers", r.scored_answers}};
}

json report_json(const PrintableReport& r) {
    auto group = [](const std::vector<ReportLine>& lines) {
        json arr = json::array();
        for (const auto& l : lines) {
            arr.push_back({{"index", l.index},
                           {"text", l.text},
                           {"value", l.value.raw()},
                           {"label", l.value.label()},
                           {"display", l.value.display()},
                           {"scored", l.scored}});
        }
        return arr;
    };
    return {{"questionnaire_no", r.questionnaire_no},
            {"teacher_display_name", r.teacher_display_name},
            {"completed_at", to_iso8601(r.completed_at)},
            {"demo", r.demo},
            {"direct", group(r.direct)},
            {"inverse", group(r.inverse)}};
}

ParameterChange parse_change(const json& body) {
    ParameterChange change;
    try {
        if (body.contains("active")) change.active = body.at("active").get<bool>();
        if (body.contains("current_teacher")) {
            const auto& v = body.at("current_teacher");
            change.current_teacher = v.is_null() ? std::optional<std::string>() : v.get<std::string>();
        }
        if (body.contains("allowlist")) change.allowlist = body.at("allowlist").get<std::set<std::string>>();
        if (body.contains("deadline_seconds")) {
            const auto& v = body.at("deadline_seconds");
            change.deadline_seconds = v.is_null() ? std::optional<std::int64_t>() : v.get<std::int64_t>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadRequest, std::string("bad config field: ") + e.what());
    }
    return change;
}

// Runs a handler, turning module errors into ApiError bodies.
template <typename F>
httplib::Server::Handler guarded(F f) {
    return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const Error& e) {
            send_error(res, e.code(), e.what());
        } catch (const std::exception& e) {
            send_error(res, ErrorCode::StorageFailure, e.what(), 500);
        }
    };
}

} // namespace

int http_status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::OutOfSequence:
    case ErrorCode::AlreadyCompleted:
    case ErrorCode::DeadlineExceeded:
    case ErrorCode::ConflictRetry:
    case ErrorCode::TeacherInUse:
    case ErrorCode::Incomplete:
        return 409;
    case ErrorCode::MissingSelection:
    case ErrorCode::ValueOutOfRange:
    case ErrorCode::OutOfRange:
    case ErrorCode::InvalidAddress:
    case ErrorCode::NoTeacherSelected:
    case ErrorCode::InvalidTeacher:
    case ErrorCode::BankGap:
    case ErrorCode::BankDuplicate:
    case ErrorCode::BankEmptyText:
    case ErrorCode::BankMismatch:
    case ErrorCode::BankFormat:
        return 422;
    case ErrorCode::ResetForbidden:
    case ErrorCode::SessionClosed:
        return 403;
    case ErrorCode::Unauthorized:
        return 401;
    case ErrorCode::NotFound:
        return 404;
    case ErrorCode::BadRequest:
        return 400;
    case ErrorCode::StorageFailure:
    case ErrorCode::SchemaMismatch:
        return 500;
    }
    return 500;
}

HttpApi::HttpApi(Store& store, ConfigCell& config, SessionEngine& engine, AdminService& admin, ApiOptions options,
                 Clock clock)
    : store_(store), config_(config), engine_(engine), admin_(admin), options_(std::move(options)),
      clock_(std::move(clock)) {}

IpAddress HttpApi::client_address(const httplib::Request& req) const {
    if (options_.trust_proxy_header && req.has_header("X-Forwarded-For")) {
        auto header = req.get_header_value("X-Forwarded-For");
        auto first = header.substr(0, header.find(','));
        auto b = first.find_first_not_of(" \t");
        auto e = first.find_last_not_of(" \t");
        return IpAddress::parse(b == std::string::npos ? std::string() : first.substr(b, e - b + 1));
    }
    return IpAddress::parse(req.remote_addr);
}

void HttpApi::mount(httplib::Server& server) {
    // Student plane: every request is classified against one config snapshot.
    server.Get("/api/session", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto ip = client_address(req);
        auto config = config_.snapshot();
        auto decision = classify_access(ip, *config);
        OpenResult result;
        try {
            result = engine_.open_or_resume(ip, *config, clock_());
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoTeacherSelected) throw;
            send_error(res, e.code(), e.what(), 503);
            return;
        }
        json body = std::visit(
            [](const auto& r) -> json {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, QuestionView>) return view_json(r);
                else if constexpr (std::is_same_v<T, CompletedNotice>)
                    return notice_json("completed", r.teacher_display_name, r.mode, r.progress);
                else if constexpr (std::is_same_v<T, DeadlineNotice>)
                    return notice_json("deadline_exceeded", r.teacher_display_name, r.mode, r.progress);
                else return json{{"state", "closed"}, {"message", "the evaluation campaign is not active"}};
            },
            result);
        body["mode"] = mode_name(decision.mode);
        body["reset_allowed"] = decision.reset_allowed;
        send_json(res, 200, body);
    }));

    server.Post("/api/session/answer", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto ip = client_address(req);
        auto body = parse_body(req);
        auto config = config_.snapshot();
        auto decision = classify_access(ip, *config);

        if (!body.contains("question_index") || !body["question_index"].is_number_integer()) {
            throw Error(ErrorCode::BadRequest, "question_index must be an integer");
        }
        int index = body["question_index"].get<int>();
        std::optional<int> raw;
        if (body.contains("value") && !body["value"].is_null()) {
            // Anything that is not an integer is off the scale.
            raw = body["value"].is_number_integer() ? body["value"].get<int>() : 0;
        }
        std::string teacher = config->current_teacher.value_or("");
        if (body.contains("teacher_id") && body["teacher_id"].is_string()) teacher = body["teacher_id"];

        auto outcome = engine_.submit_answer(ip, *config, teacher, index, raw, clock_());
        json out;
        int status = 200;
        if (auto* a = std::get_if<Accepted>(&outcome)) {
            out = view_json(a->next);
            out["outcome"] = "accepted";
        } else if (auto* c = std::get_if<Completed>(&outcome)) {
            out = notice_json("completed", c->notice.teacher_display_name, c->notice.mode, c->notice.progress);
            out["outcome"] = "completed";
        } else {
            const auto& r = std::get<Rejected>(outcome);
            out = error_json(r.reason, r.message);
            out["outcome"] = "rejected";
            out["retry"] = r.retry ? view_json(*r.retry) : json();
            status = http_status_for(r.reason);
        }
        out["mode"] = mode_name(decision.mode);
        out["reset_allowed"] = decision.reset_allowed;
        send_json(res, status, out);
    }));

    server.Post("/api/session/reset", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto ip = client_address(req);
        auto config = config_.snapshot();
        auto removed = engine_.reset_demo(ip, *config);
        send_json(res, 200, {{"reset", true}, {"removed_answers", removed}, {"mode", "demo"}, {"reset_allowed", true}});
    }));

    // Admin plane. Not gated by the allowlist.
    server.Post("/api/admin/login", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        AdminCredential cred;
        if (body.contains("username") && body["username"].is_string()) cred.username = body["username"];
        if (body.contains("password") && body["password"].is_string()) cred.password = body["password"];
        auto token = admin_.authenticate(cred);
        send_json(res, 200, {{"token", token}, {"token_type", "Bearer"}, {"expires_in", 30 * 60}});
    }));

    server.Get("/api/admin/status", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, status_json(admin_.view_status(bearer_token(req))));
    }));

    server.Put("/api/admin/config", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto token = bearer_token(req);
        admin_.require(token);
        auto change = parse_change(parse_body(req));
        send_json(res, 200, config_json(admin_.set_parameters(token, change)));
    }));

    server.Get("/api/admin/teachers", guarded([this](const httplib::Request& req, httplib::Response& res) {
        json arr = json::array();
        for (const auto& t : admin_.list_teachers(bearer_token(req))) {
            arr.push_back({{"id", t.id}, {"display_name", t.display_name}});
        }
        send_json(res, 200, {{"teachers", arr}});
    }));

    server.Post("/api/admin/teachers", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto token = bearer_token(req);
        admin_.require(token);
        auto body = parse_body(req);
        Teacher t;
        if (body.contains("id") && body["id"].is_string()) t.id = body["id"];
        if (body.contains("display_name") && body["display_name"].is_string()) t.display_name = body["display_name"];
        if (t.display_name.empty()) throw Error(ErrorCode::InvalidTeacher, "display_name is required");
        auto stored = admin_.upsert_teacher(token, t);
        send_json(res, 200, {{"id", stored.id}, {"display_name", stored.display_name}});
    }));

    server.Delete(R"(/api/admin/teachers/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        admin_.remove_teacher(bearer_token(req), req.matches[1]);
        send_json(res, 200, {{"removed", std::string(req.matches[1])}});
    }));

    server.Post("/api/admin/bank/reload", guarded([this](const httplib::Request& req, httplib::Response& res) {
        admin_.require(bearer_token(req));
        if (!options_.questions_file) throw Error(ErrorCode::NotFound, "no question bank file configured");
        auto bank = std::make_shared<const QuestionBank>(
            load_question_bank(*options_.questions_file, engine_.bank()->size()));
        engine_.replace_bank(bank);
        send_json(res, 200, {{"questions", bank->size()}});
    }));

    // Results plane.
    server.Get("/api/results", guarded([this](const httplib::Request& req, httplib::Response& res) {
        admin_.require(bearer_token(req));
        std::optional<std::string> teacher;
        if (req.has_param("teacher") && !req.get_param_value("teacher").empty()) {
            teacher = req.get_param_value("teacher");
        }
        bool include_demo = false;
        if (req.has_param("include_demo")) {
            auto v = req.get_param_value("include_demo");
            include_demo = v == "true" || v == "1";
        }
        auto bank = engine_.bank();
        json rows = json::array();
        for (const auto& r : list_results(store_, *bank, teacher, include_demo)) rows.push_back(row_json(r));
        json columns = json::array();
        for (const auto& q : bank->items()) {
            columns.push_back({{"name", "e" + std::to_string(q.index)}, {"direction", direction_name(q.direction)}});
        }
        send_json(res, 200, {{"include_demo", include_demo}, {"columns", columns}, {"rows", rows}});
    }));

    server.Get(R"(/api/results/(\d+)/print)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        admin_.require(bearer_token(req));
        auto report = printable_report(store_, *engine_.bank(), std::stoll(req.matches[1]));
        if (req.has_param("format") && req.get_param_value("format") == "json") {
            send_json(res, 200, report_json(report));
        } else {
            res.status = 200;
            res.set_content(render_report_html(report), "text/html; charset=utf-8");
        }
    }));

    if (options_.static_dir && std::filesystem::is_directory(*options_.static_dir)) {
        server.set_mount_point("/", options_.static_dir->string());
    }

    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.status == 404 && req.path.rfind("/api/", 0) == 0) {
            send_error(res, ErrorCode::NotFound, "no route " + req.method + " " + req.path);
        }
    });
}

} // namespace teacheval
