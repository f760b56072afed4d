#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "teacheval/error.hpp"

#include <algorithm>
#include <set>

using namespace teacheval;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::BadRequest;
}

} // namespace

TEST_CASE("make_answer_value carries the canonical labels") {
    auto five = make_answer_value(5);
    CHECK(five.raw() == 5);
    CHECK(five.label() == "foarte mult");
    CHECK(five.display() == "5 - foarte mult");

    auto one = make_answer_value(1);
    CHECK(one.label() == "foarte puțin sau deloc");
    CHECK(make_answer_value(2).label() == "puțin");
    CHECK(make_answer_value(3).label() == "nici prea mult, nici prea puțin");
    CHECK(make_answer_value(4).label() == "mult");
}

TEST_CASE("make_answer_value rejects values off the scale") {
    CHECK(code_of([] { make_answer_value(0); }) == ErrorCode::OutOfRange);
    CHECK(code_of([] { make_answer_value(6); }) == ErrorCode::OutOfRange);
    CHECK(code_of([] { make_answer_value(-1); }) == ErrorCode::OutOfRange);
}

TEST_CASE("label mapping is a bijection that round-trips") {
    std::set<std::string_view> labels;
    for (int v = 1; v <= 5; ++v) {
        auto a = make_answer_value(v);
        labels.insert(a.label());
        auto back = AnswerValue::from_label(a.label());
        REQUIRE(back);
        CHECK(back->raw() == v);
    }
    CHECK(labels.size() == 5);
    CHECK_FALSE(AnswerValue::from_label("nu știu"));
}

TEST_CASE("question bank validation") {
    std::vector<Question> full;
    for (int i = 1; i <= 58; ++i) full.push_back({i, "q" + std::to_string(i), Direction::Direct});
    CHECK(validate_question_bank(full, 58).size() == 58);

    std::vector<Question> gap{{1, "a", Direction::Direct}, {2, "b", Direction::Direct}, {4, "d", Direction::Direct}};
    try {
        validate_question_bank(gap, 4);
        FAIL("gap accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BankGap);
        CHECK(std::string(e.what()).find('3') != std::string::npos);
    }

    CHECK(validate_question_bank({}, 0).empty());

    std::vector<Question> dup{{1, "a", Direction::Direct}, {1, "b", Direction::Direct}};
    CHECK(code_of([&] { validate_question_bank(dup, 2); }) == ErrorCode::BankDuplicate);

    std::vector<Question> blank{{1, "", Direction::Direct}};
    CHECK(code_of([&] { validate_question_bank(blank, 1); }) == ErrorCode::BankEmptyText);

    std::vector<Question> beyond{{1, "a", Direction::Direct}, {3, "c", Direction::Direct}};
    CHECK(code_of([&] { validate_question_bank(beyond, 2); }) == ErrorCode::BankGap);
}

TEST_CASE("validated banks are contiguous whatever the input order") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        int n = std::uniform_int_distribution<int>(0, 70)(rng);
        std::vector<Question> items;
        for (int i = 1; i <= n; ++i) items.push_back({i, "t", Direction::Inverse});
        std::shuffle(items.begin(), items.end(), rng);
        auto bank = validate_question_bank(items, n);
        for (int i = 0; i < bank.size(); ++i) CHECK(bank.items()[static_cast<std::size_t>(i)].index == i + 1);
    }
}

TEST_CASE("bank JSON parsing") {
    auto bank = parse_question_bank(
        R"([{"index":2,"text":"Arată respect studenților.","direction":"direct"},
            {"index":1,"text":"x","direction":"inverse"}])",
        2);
    CHECK(bank.at(1).direction == Direction::Inverse);
    CHECK(bank.at(2).text == "Arată respect studenților.");
    CHECK(code_of([] { parse_question_bank("{}", 0); }) == ErrorCode::BankFormat);
    CHECK(code_of([] { parse_question_bank(R"([{"index":1,"text":"x","direction":"sideways"}])", 1); }) ==
          ErrorCode::BankFormat);
    CHECK(code_of([] { parse_question_bank("[", 1); }) == ErrorCode::BankFormat);
    CHECK(code_of([&] { bank.at(3); }) == ErrorCode::OutOfRange);
}

TEST_CASE("shipped sample bank") {
    auto bank = load_question_bank(testing::source_dir() / "data/questions.json", kDefaultQuestionCount);
    CHECK(bank.size() == 58);
    CHECK(bank.at(2).text == "Arată respect studenților.");
    CHECK(bank.at(2).direction == Direction::Direct);
    auto inverse = std::count_if(bank.items().begin(), bank.items().end(),
                                 [](const Question& q) { return q.direction == Direction::Inverse; });
    CHECK(inverse > 0);
    CHECK(inverse < 58);
}

TEST_CASE("addresses are canonicalised") {
    CHECK(IpAddress::parse("10.0.0.1").str() == "10.0.0.1");
    CHECK(IpAddress::parse("2001:DB8:0:0::1").str() == "2001:db8::1");
    CHECK(code_of([] { IpAddress::parse("10.0.0.300"); }) == ErrorCode::InvalidAddress);
    CHECK(code_of([] { IpAddress::parse(""); }) == ErrorCode::InvalidAddress);
    CHECK(code_of([] { IpAddress::parse("localhost"); }) == ErrorCode::InvalidAddress);
}

TEST_CASE("campaign config invariants") {
    CampaignConfig c;
    c.active = true;
    CHECK(code_of([&] { validate_config(c); }) == ErrorCode::NoTeacherSelected);
    c.current_teacher = "t1";
    validate_config(c);
    c.allowlist = {"2001:DB8::1"};
    CHECK(code_of([&] { validate_config(c); }) == ErrorCode::InvalidAddress);
    c.allowlist = {"2001:db8::1"};
    c.deadline_seconds = 0;
    CHECK(code_of([&] { validate_config(c); }) == ErrorCode::OutOfRange);
}

TEST_CASE("timestamps format as ISO-8601 UTC") {
    CHECK(to_iso8601(from_unix(0)) == "1970-01-01T00:00:00Z");
    CHECK(to_iso8601(from_unix(1178846100)) == "2007-05-11T01:15:00Z");
}
