#pragma once

#include "teacheval/bank.hpp"
#include "teacheval/store.hpp"

#include <optional>
#include <string>
#include <vector>

namespace teacheval {

// Direct: unchanged. Inverse: reflected on the 1..5 scale (6 - raw).
int score_item(AnswerValue raw, Direction direction);

struct ResultRow {
    std::int64_t questionnaire_no = 0;
    bool demo = false;
    Timestamp completed_at{};
    std::string teacher_id;
    std::string teacher_display_name;
    std::vector<int> raw_answers;
    std::vector<int> scored_answers;
};

// Throws Incomplete when the stored session is not finished.
ResultRow make_result_row(const StoredResult& stored, const QuestionBank& bank);

// Complete sessions only, newest first.
std::vector<ResultRow> list_results(const Store& store, const QuestionBank& bank,
                                    const std::optional<std::string>& teacher_id, bool include_demo);

struct ReportLine {
    int index = 0;
    std::string text;
    AnswerValue value = make_answer_value(kMinAnswer);
    int scored = 0;
};

struct PrintableReport {
    std::int64_t questionnaire_no = 0;
    std::string teacher_display_name;
    Timestamp completed_at{};
    bool demo = false;
    std::vector<ReportLine> direct;
    std::vector<ReportLine> inverse;
};

PrintableReport printable_report(const StoredResult& stored, const QuestionBank& bank);
// Throws NotFound or Incomplete.
PrintableReport printable_report(const Store& store, const QuestionBank& bank, std::int64_t questionnaire_no);

// Standalone print-oriented HTML page.
std::string render_report_html(const PrintableReport& report);

// Tab-separated table: header row, then one line per result.
std::string export_results_tsv(const std::vector<ResultRow>& rows, int total);

} // namespace teacheval
