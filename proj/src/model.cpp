#include "teacheval/model.hpp"

#include "teacheval/error.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>

#include <ctime>

namespace teacheval {

namespace {

constexpr std::array<std::string_view, 5> kLabels = {
    "foarte puțin sau deloc",
    "puțin",
    "nici prea mult, nici prea puțin",
    "mult",
    "foarte mult",
};

} // namespace

Timestamp now_utc() {
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string to_iso8601(Timestamp t) {
    std::time_t tt = static_cast<std::time_t>(to_unix(t));
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Timestamp from_unix(std::int64_t seconds) {
    return Timestamp{std::chrono::seconds{seconds}};
}

std::int64_t to_unix(Timestamp t) {
    return t.time_since_epoch().count();
}

std::string_view direction_name(Direction d) {
    return d == Direction::Direct ? "direct" : "inverse";
}

std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "direct") return Direction::Direct;
    if (s == "inverse") return Direction::Inverse;
    return std::nullopt;
}

std::string_view AnswerValue::label() const noexcept {
    return kLabels[static_cast<std::size_t>(raw_ - kMinAnswer)];
}

std::string AnswerValue::display() const {
    return std::to_string(raw_) + " - " + std::string(label());
}

std::optional<AnswerValue> AnswerValue::from_label(std::string_view label) {
    for (std::size_t i = 0; i < kLabels.size(); ++i) {
        if (kLabels[i] == label) return AnswerValue(static_cast<int>(i) + kMinAnswer);
    }
    return std::nullopt;
}

AnswerValue make_answer_value(int raw) {
    if (raw < kMinAnswer || raw > kMaxAnswer) {
        throw Error(ErrorCode::OutOfRange,
                    "answer value " + std::to_string(raw) + " is outside 1..5");
    }
    return AnswerValue(raw);
}

const std::array<std::string_view, 5>& likert_labels() {
    return kLabels;
}

void validate_teacher(const Teacher& t) {
    if (t.id.empty()) throw Error(ErrorCode::InvalidTeacher, "teacher id is empty");
    if (t.display_name.empty()) throw Error(ErrorCode::InvalidTeacher, "teacher name is empty");
}

std::string_view mode_name(SessionMode m) {
    switch (m) {
    case SessionMode::Official: return "official";
    case SessionMode::Demo: return "demo";
    case SessionMode::Closed: return "closed";
    }
    return "closed";
}

std::optional<SessionMode> parse_mode(std::string_view s) {
    if (s == "official") return SessionMode::Official;
    if (s == "demo") return SessionMode::Demo;
    if (s == "closed") return SessionMode::Closed;
    return std::nullopt;
}

IpAddress IpAddress::parse(std::string_view s) {
    std::string text(s);
    char out[INET6_ADDRSTRLEN];
    in_addr v4{};
    if (inet_pton(AF_INET, text.c_str(), &v4) == 1) {
        inet_ntop(AF_INET, &v4, out, sizeof out);
        return IpAddress(out);
    }
    in6_addr v6{};
    if (inet_pton(AF_INET6, text.c_str(), &v6) == 1) {
        inet_ntop(AF_INET6, &v6, out, sizeof out);
        return IpAddress(out);
    }
    throw Error(ErrorCode::InvalidAddress, "invalid address: " + text);
}

void validate_config(const CampaignConfig& config) {
    if (config.active && !config.current_teacher) {
        throw Error(ErrorCode::NoTeacherSelected, "cannot activate without a current teacher");
    }
    for (const auto& entry : config.allowlist) {
        if (IpAddress::parse(entry).str() != entry) {
            throw Error(ErrorCode::InvalidAddress, "allowlist entry not canonical: " + entry);
        }
    }
    if (config.deadline_seconds && *config.deadline_seconds <= 0) {
        throw Error(ErrorCode::OutOfRange, "deadline must be positive");
    }
}

} // namespace teacheval
