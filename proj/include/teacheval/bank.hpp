#pragma once

#include "teacheval/model.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace teacheval {

// Ordered, contiguous questionnaire: items()[i].index == i + 1.
class QuestionBank {
public:
    QuestionBank() = default;

    int size() const noexcept { return static_cast<int>(items_.size()); }
    bool empty() const noexcept { return items_.empty(); }
    std::span<const Question> items() const noexcept { return items_; }
    // 1-based; throws Error(OutOfRange).
    const Question& at(int index) const;

private:
    explicit QuestionBank(std::vector<Question> items) : items_(std::move(items)) {}
    friend QuestionBank validate_question_bank(std::vector<Question>, int);

    std::vector<Question> items_;
};

// Throws BankGap, BankDuplicate or BankEmptyText.
QuestionBank validate_question_bank(std::vector<Question> items, int n_expected);

// JSON array of {"index", "text", "direction"}; throws BankFormat on bad JSON.
QuestionBank parse_question_bank(std::string_view json_text, int n_expected);
QuestionBank load_question_bank(const std::filesystem::path& path, int n_expected);

} // namespace teacheval
