#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "teacheval/http_api.hpp"

#include <httplib.h>
#include <json.hpp>

#include <thread>

using namespace teacheval;
using nlohmann::json;

namespace {

// A live server on an ephemeral port, client address taken from X-Forwarded-For.
struct Service {
    explicit Service(int n = 4, bool trust_proxy = true)
        : store(":memory:"), engine(store, testing::make_bank(n, 2)),
          config(bootstrap_config(store, std::string("admin"), hash_password("pw", true), std::nullopt, now_utc())),
          admin(store, config, engine),
          api(store, config, engine, admin, ApiOptions{trust_proxy, std::nullopt, std::nullopt}) {
        api.mount(server);
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~Service() {
        server.stop();
        thread.join();
    }

    httplib::Client client(const std::string& ip = "") const {
        httplib::Client c("127.0.0.1", port);
        if (!ip.empty()) c.set_default_headers({{"X-Forwarded-For", ip}});
        return c;
    }

    std::string token() {
        auto res = client().Post("/api/admin/login", R"({"username":"admin","password":"pw"})", "application/json");
        REQUIRE(res);
        REQUIRE(res->status == 200);
        return json::parse(res->body)["token"];
    }

    httplib::Client admin_client(const std::string& ip = "") {
        auto c = client(ip);
        c.set_bearer_token_auth(token());
        return c;
    }

    void activate(std::set<std::string> allowlist) {
        auto c = admin_client();
        REQUIRE(c.Post("/api/admin/teachers", R"({"id":"t1","display_name":"Conf. dr. Lucian Luca"})",
                       "application/json")
                    ->status == 200);
        json body = {{"active", true}, {"current_teacher", "t1"}, {"allowlist", allowlist}};
        auto res = c.Put("/api/admin/config", body.dump(), "application/json");
        REQUIRE(res->status == 200);
    }

    SqliteStore store;
    SessionEngine engine;
    ConfigCell config;
    AdminService admin;
    HttpApi api;
    httplib::Server server;
    int port = 0;
    std::thread thread;
};

json answer(httplib::Client& c, json body, int& status) {
    auto res = c.Post("/api/session/answer", body.dump(), "application/json");
    REQUIRE(res);
    status = res->status;
    return json::parse(res->body);
}

json get_session(httplib::Client& c) {
    auto res = c.Get("/api/session");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    return json::parse(res->body);
}

} // namespace

TEST_CASE("error status mapping is fixed") {
    CHECK(http_status_for(ErrorCode::OutOfSequence) == 409);
    CHECK(http_status_for(ErrorCode::MissingSelection) == 422);
    CHECK(http_status_for(ErrorCode::ValueOutOfRange) == 422);
    CHECK(http_status_for(ErrorCode::ResetForbidden) == 403);
    CHECK(http_status_for(ErrorCode::Unauthorized) == 401);
    CHECK(http_status_for(ErrorCode::NotFound) == 404);
}

TEST_CASE("closed campaign answers with a closed notice") {
    Service s;
    auto c = s.client("10.0.0.1");
    auto body = get_session(c);
    CHECK(body["state"] == "closed");
    CHECK(body["mode"] == "closed");
    CHECK(body["reset_allowed"] == false);

    int status = 0;
    auto rej = answer(c, {{"question_index", 1}, {"value", 3}}, status);
    CHECK(status == 403);
    CHECK(rej["error"]["code"] == "CAMPAIGN_CLOSED");
}

TEST_CASE("student flow over the wire") {
    Service s;
    s.activate({"10.0.0.5"});
    auto official = s.client("10.0.0.5");
    auto demo = s.client("192.168.7.7");

    auto first = get_session(official);
    CHECK(first["state"] == "question");
    CHECK(first["mode"] == "official");
    CHECK(first["reset_allowed"] == false);
    CHECK(first["question"]["index"] == 1);
    CHECK(first["teacher"]["display_name"] == "Conf. dr. Lucian Luca");
    CHECK(first["progress"]["total"] == 4);

    CHECK(get_session(demo)["mode"] == "demo");
    CHECK(get_session(demo)["reset_allowed"] == true);

    int status = 0;
    auto acc = answer(official, {{"question_index", 1}, {"value", 5}}, status);
    CHECK(status == 200);
    CHECK(acc["outcome"] == "accepted");
    CHECK(acc["question"]["index"] == 2);

    SUBCASE("skip is 409 with the authoritative question") {
        auto rej = answer(official, {{"question_index", 3}, {"value", 4}}, status);
        CHECK(status == 409);
        CHECK(rej["error"]["code"] == "OUT_OF_SEQUENCE");
        CHECK(rej["retry"]["question"]["index"] == 2);
    }
    SUBCASE("replaying a captured body cannot advance") {
        auto rej = answer(official, {{"question_index", 1}, {"value", 5}}, status);
        CHECK(status == 409);
        CHECK(rej["retry"]["question"]["index"] == 2);
        CHECK(get_session(official)["progress"]["answered"] == 1);
    }
    SUBCASE("no selection is 422 and the same question") {
        auto rej = answer(official, {{"question_index", 2}}, status);
        CHECK(status == 422);
        CHECK(rej["error"]["code"] == "MISSING_SELECTION");
        CHECK(rej["retry"]["question"]["index"] == 2);
        CHECK(rej["retry"]["status_message"].is_string());
        auto nulled = answer(official, {{"question_index", 2}, {"value", nullptr}}, status);
        CHECK(nulled["error"]["code"] == "MISSING_SELECTION");
    }
    SUBCASE("tampered values are 422") {
        auto rej = answer(official, {{"question_index", 2}, {"value", 9}}, status);
        CHECK(status == 422);
        CHECK(rej["error"]["code"] == "VALUE_OUT_OF_RANGE");
        answer(official, {{"question_index", 2}, {"value", "5"}}, status);
        CHECK(status == 422);
    }
    SUBCASE("malformed bodies are 400") {
        auto res = official.Post("/api/session/answer", "{not json", "application/json");
        CHECK(res->status == 400);
        answer(official, {{"value", 3}}, status);
        CHECK(status == 400);
    }
    SUBCASE("official reset is forbidden") {
        auto res = official.Post("/api/session/reset", "", "application/json");
        CHECK(res->status == 403);
        CHECK(json::parse(res->body)["error"]["code"] == "RESET_FORBIDDEN");
        CHECK(get_session(official)["progress"]["answered"] == 1);
    }
    SUBCASE("demo reset restarts") {
        answer(demo, {{"question_index", 1}, {"value", 2}}, status);
        answer(demo, {{"question_index", 2}, {"value", 2}}, status);
        auto res = demo.Post("/api/session/reset", "", "application/json");
        CHECK(res->status == 200);
        CHECK(json::parse(res->body)["removed_answers"] == 2);
        CHECK(get_session(demo)["question"]["index"] == 1);
    }
    SUBCASE("completion and single evaluation") {
        for (int i = 2; i <= 4; ++i) answer(official, {{"question_index", i}, {"value", 4}}, status);
        CHECK(status == 200);
        CHECK(get_session(official)["state"] == "completed");
        auto rej = answer(official, {{"question_index", 4}, {"value", 4}}, status);
        CHECK(status == 409);
        CHECK(rej["error"]["code"] == "ALREADY_COMPLETED");
        CHECK(rej["retry"].is_null());
    }
}

TEST_CASE("malformed forwarded address is a 422") {
    Service s;
    s.activate({});
    auto c = s.client("10.0.0.300");
    auto res = c.Get("/api/session");
    REQUIRE(res);
    CHECK(res->status == 422);
    CHECK(json::parse(res->body)["error"]["code"] == "INVALID_ADDRESS");
}

TEST_CASE("forwarded header is ignored unless trusted") {
    Service s(4, false);
    s.activate({"10.0.0.5"});
    auto c = s.client("10.0.0.5");
    CHECK(get_session(c)["mode"] == "demo");
    CHECK(s.store.status().respondents.at(0).client_ip == "127.0.0.1");
}

TEST_CASE("admin plane") {
    Service s;
    CHECK(s.client().Get("/api/admin/status")->status == 401);
    auto bad = s.client().Post("/api/admin/login", R"({"username":"admin","password":"nope"})", "application/json");
    CHECK(bad->status == 401);
    CHECK(json::parse(bad->body)["error"]["code"] == "UNAUTHORIZED");

    auto c = s.admin_client("203.0.113.9");
    auto status = json::parse(c.Get("/api/admin/status")->body);
    CHECK(status["active"] == false);
    CHECK(status["session_counts"]["official"] == 0);

    auto res = c.Put("/api/admin/config", R"({"active":true})", "application/json");
    CHECK(res->status == 422);
    CHECK(json::parse(res->body)["error"]["code"] == "NO_TEACHER_SELECTED");
    res = c.Put("/api/admin/config", R"({"allowlist":["10.0.0.300"]})", "application/json");
    CHECK(json::parse(res->body)["error"]["code"] == "INVALID_ADDRESS");
    res = c.Put("/api/admin/config", R"({"active":"yes"})", "application/json");
    CHECK(res->status == 400);

    s.activate({"10.0.0.5"});
    auto student = s.client("10.0.0.77");
    get_session(student);
    int code = 0;
    answer(student, {{"question_index", 1}, {"value", 3}}, code);

    status = json::parse(c.Get("/api/admin/status")->body);
    CHECK(status["active"] == true);
    CHECK(status["current_teacher"] == "Conf. dr. Lucian Luca");
    CHECK(status["session_counts"]["demo"] == 1);
    CHECK(status["session_counts"]["in_progress"] == 1);
    auto loc = status["respondent_locations"][0];
    CHECK(loc["client_ip"] == "10.0.0.77");
    CHECK(loc["answered"] == 1);
    CHECK_FALSE(loc.contains("answers"));
    CHECK(status.dump().find("\"value\"") == std::string::npos);

    // Allowlist edits apply to the next student request.
    CHECK(c.Put("/api/admin/config", R"({"allowlist":["10.0.0.5","10.0.0.88"]})", "application/json")->status == 200);
    auto newly_allowed = s.client("10.0.0.88");
    CHECK(get_session(newly_allowed)["mode"] == "official");

    auto teachers = json::parse(c.Get("/api/admin/teachers")->body)["teachers"];
    CHECK(teachers.size() == 1);
    auto del = c.Delete("/api/admin/teachers/t1");
    CHECK(del->status == 409);
    CHECK(json::parse(del->body)["error"]["code"] == "TEACHER_IN_USE");
    CHECK(c.Delete("/api/admin/teachers/ghost")->status == 404);
    CHECK(c.Get("/api/admin/nope")->status == 404);
}

TEST_CASE("results plane") {
    Service s;
    s.activate({"10.0.0.5"});
    CHECK(s.client().Get("/api/results")->status == 401);

    int status = 0;
    for (const char* ip : {"10.0.0.5", "192.168.0.1"}) {
        auto c = s.client(ip);
        for (int i = 1; i <= 4; ++i) answer(c, {{"question_index", i}, {"value", 5}}, status);
    }
    auto c = s.admin_client();
    auto official = json::parse(c.Get("/api/results")->body);
    CHECK(official["include_demo"] == false);
    REQUIRE(official["rows"].size() == 1);
    CHECK(official["rows"][0]["demo"] == false);
    CHECK(official["rows"][0]["raw_answers"] == json::array({5, 5, 5, 5}));
    CHECK(official["rows"][0]["scored_answers"] == json::array({5, 1, 5, 1}));
    CHECK(official["columns"].size() == 4);

    auto all = json::parse(c.Get("/api/results?include_demo=true")->body);
    REQUIRE(all["rows"].size() == 2);
    CHECK(all["rows"][0]["demo"] == true);
    CHECK(json::parse(c.Get("/api/results?include_demo=true&teacher=nobody")->body)["rows"].empty());

    auto no = official["rows"][0]["questionnaire_no"].get<int>();
    auto print = c.Get("/api/results/" + std::to_string(no) + "/print");
    CHECK(print->status == 200);
    CHECK(print->get_header_value("Content-Type").find("text/html") != std::string::npos);
    CHECK(print->body.find("Chestionar nr.: " + std::to_string(no)) != std::string::npos);
    CHECK(print->body.find("5 - foarte mult") != std::string::npos);

    auto as_json = json::parse(c.Get("/api/results/" + std::to_string(no) + "/print?format=json")->body);
    CHECK(as_json["direct"].size() == 2);
    CHECK(as_json["inverse"].size() == 2);
    CHECK(as_json["direct"][0]["display"] == "5 - foarte mult");

    auto missing = c.Get("/api/results/999/print");
    CHECK(missing->status == 404);
}

TEST_CASE("unknown API routes are 404") {
    Service s;
    auto res = s.client().Get("/api/nothing");
    REQUIRE(res);
    CHECK(res->status == 404);
}
