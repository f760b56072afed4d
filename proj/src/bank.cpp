#include "teacheval/bank.hpp"

#include "teacheval/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace teacheval {

const Question& QuestionBank::at(int index) const {
    if (index < 1 || index > size()) {
        throw Error(ErrorCode::OutOfRange, "no question " + std::to_string(index));
    }
    return items_[static_cast<std::size_t>(index - 1)];
}

QuestionBank validate_question_bank(std::vector<Question> items, int n_expected) {
    std::vector<int> seen(static_cast<std::size_t>(std::max(n_expected, 0)) + 1, 0);
    for (const auto& q : items) {
        if (q.text.empty()) {
            throw Error(ErrorCode::BankEmptyText, "question " + std::to_string(q.index) + " has no text");
        }
        if (q.index < 1 || q.index > n_expected) {
            throw Error(ErrorCode::BankGap, "question index " + std::to_string(q.index) +
                                                " outside 1.." + std::to_string(n_expected));
        }
        if (seen[static_cast<std::size_t>(q.index)]++ != 0) {
            throw Error(ErrorCode::BankDuplicate, "duplicate question index " + std::to_string(q.index));
        }
    }
    for (int i = 1; i <= n_expected; ++i) {
        if (seen[static_cast<std::size_t>(i)] == 0) {
            throw Error(ErrorCode::BankGap, "missing question index " + std::to_string(i));
        }
    }
    std::sort(items.begin(), items.end(),
              [](const Question& a, const Question& b) { return a.index < b.index; });
    return QuestionBank(std::move(items));
}

QuestionBank parse_question_bank(std::string_view json_text, int n_expected) {
    std::vector<Question> items;
    try {
        auto doc = nlohmann::json::parse(json_text);
        if (!doc.is_array()) throw Error(ErrorCode::BankFormat, "question bank must be a JSON array");
        for (const auto& rec : doc) {
            Question q;
            q.index = rec.at("index").get<int>();
            q.text = rec.at("text").get<std::string>();
            auto dir = parse_direction(rec.at("direction").get<std::string>());
            if (!dir) {
                throw Error(ErrorCode::BankFormat,
                            "question " + std::to_string(q.index) + ": direction must be direct or inverse");
            }
            q.direction = *dir;
            items.push_back(std::move(q));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BankFormat, std::string("question bank: ") + e.what());
    }
    return validate_question_bank(std::move(items), n_expected);
}

QuestionBank load_question_bank(const std::filesystem::path& path, int n_expected) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BankFormat, "cannot read question bank " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_question_bank(ss.str(), n_expected);
}

} // namespace teacheval
