#pragma once

// Domain values shared by every layer of the service. All of them are
// immutable once constructed and validated.

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace teacheval {

inline constexpr int kDefaultQuestionCount = 58;
inline constexpr int kMinAnswer = 1;
inline constexpr int kMaxAnswer = 5;

// UTC, second precision.
using Timestamp = std::chrono::sys_seconds;

Timestamp now_utc();
std::string to_iso8601(Timestamp t);
Timestamp from_unix(std::int64_t seconds);
std::int64_t to_unix(Timestamp t);

enum class Direction { Direct, Inverse };

std::string_view direction_name(Direction d);
std::optional<Direction> parse_direction(std::string_view s);

struct Question {
    int index = 0;
    std::string text;
    Direction direction = Direction::Direct;

    bool operator==(const Question&) const = default;
};

// A validated Likert response, 1..5 with its fixed label.
class AnswerValue {
public:
    int raw() const noexcept { return raw_; }
    std::string_view label() const noexcept;
    // "5 - foarte mult"
    std::string display() const;

    static std::optional<AnswerValue> from_label(std::string_view label);

    bool operator==(const AnswerValue&) const = default;

private:
    explicit AnswerValue(int raw) : raw_(raw) {}
    friend AnswerValue make_answer_value(int raw);

    int raw_;
};

// Throws Error(OutOfRange) unless raw is in [1, 5].
AnswerValue make_answer_value(int raw);

const std::array<std::string_view, 5>& likert_labels();

struct Teacher {
    std::string id;
    std::string display_name;

    bool operator==(const Teacher&) const = default;
};

// Throws Error(InvalidTeacher) on empty id or display name.
void validate_teacher(const Teacher& t);

enum class SessionMode { Official, Demo, Closed };

std::string_view mode_name(SessionMode m);
std::optional<SessionMode> parse_mode(std::string_view s);

// Source address in canonical textual form (inet_ntop output).
class IpAddress {
public:
    // Throws Error(InvalidAddress) when s is neither IPv4 nor IPv6.
    static IpAddress parse(std::string_view s);

    const std::string& str() const noexcept { return text_; }

    auto operator<=>(const IpAddress&) const = default;

private:
    explicit IpAddress(std::string text) : text_(std::move(text)) {}
    std::string text_;
};

struct SessionKey {
    std::string client_ip;
    std::string teacher_id;

    auto operator<=>(const SessionKey&) const = default;
};

struct EvaluationSession {
    SessionKey key;
    int last_answered = 0;
    SessionMode mode = SessionMode::Demo;
    Timestamp started_at{};
    std::optional<Timestamp> completed_at;
    // Assigned when the last item is accepted.
    std::optional<std::int64_t> questionnaire_no;

    bool complete() const noexcept { return completed_at.has_value(); }
};

struct AnswerRecord {
    SessionKey key;
    int question_index = 0;
    AnswerValue value = make_answer_value(kMinAnswer);
    Timestamp answered_at{};
};

struct CampaignConfig {
    bool active = false;
    std::optional<std::string> current_teacher;
    std::set<std::string> allowlist;
    std::optional<std::int64_t> deadline_seconds;
    std::string admin_username;
    std::string admin_password_hash;

    bool operator==(const CampaignConfig&) const = default;
};

// Throws NoTeacherSelected, InvalidAddress (non-canonical allowlist entry)
// or OutOfRange (non-positive deadline).
void validate_config(const CampaignConfig& config);

} // namespace teacheval
