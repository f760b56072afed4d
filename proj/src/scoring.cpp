#include "teacheval/scoring.hpp"

#include "teacheval/error.hpp"

#include <sstream>

namespace teacheval {

namespace {

std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&#39;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string tsv_field(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return out;
}

void render_group(std::ostringstream& html, const char* heading, const std::vector<ReportLine>& lines) {
    html << "<section class=\"group\">\n<h2>" << heading << "</h2>\n"
         << "<table>\n<thead><tr><th>Nr. enunț</th><th>Răspunsul oferit</th></tr></thead>\n<tbody>\n";
    for (const auto& line : lines) {
        html << "<tr><td title=\"" << html_escape(line.text) << "\">" << line.index << "</td><td>"
             << html_escape(line.value.display()) << "</td></tr>\n";
    }
    html << "</tbody>\n</table>\n</section>\n";
}

} // namespace

int score_item(AnswerValue raw, Direction direction) {
    return direction == Direction::Direct ? raw.raw() : (kMinAnswer + kMaxAnswer) - raw.raw();
}

ResultRow make_result_row(const StoredResult& stored, const QuestionBank& bank) {
    if (!stored.session.complete() || static_cast<int>(stored.answers.size()) != bank.size()) {
        throw Error(ErrorCode::Incomplete, "questionnaire is not complete");
    }
    ResultRow row;
    row.questionnaire_no = stored.session.questionnaire_no.value_or(0);
    row.demo = stored.session.mode == SessionMode::Demo;
    row.completed_at = *stored.session.completed_at;
    row.teacher_id = stored.session.key.teacher_id;
    row.teacher_display_name = stored.teacher_display_name;
    row.raw_answers.reserve(stored.answers.size());
    row.scored_answers.reserve(stored.answers.size());
    for (std::size_t i = 0; i < stored.answers.size(); ++i) {
        row.raw_answers.push_back(stored.answers[i].raw());
        row.scored_answers.push_back(score_item(stored.answers[i], bank.items()[i].direction));
    }
    return row;
}

std::vector<ResultRow> list_results(const Store& store, const QuestionBank& bank,
                                    const std::optional<std::string>& teacher_id, bool include_demo) {
    auto stored = store.snapshot_results({teacher_id, include_demo, false});
    std::vector<ResultRow> rows;
    rows.reserve(stored.size());
    for (const auto& s : stored) rows.push_back(make_result_row(s, bank));
    return rows;
}

PrintableReport printable_report(const StoredResult& stored, const QuestionBank& bank) {
    if (!stored.session.complete() || static_cast<int>(stored.answers.size()) != bank.size()) {
        throw Error(ErrorCode::Incomplete, "questionnaire is not complete");
    }
    PrintableReport report;
    report.questionnaire_no = stored.session.questionnaire_no.value_or(0);
    report.teacher_display_name = stored.teacher_display_name;
    report.completed_at = *stored.session.completed_at;
    report.demo = stored.session.mode == SessionMode::Demo;
    for (std::size_t i = 0; i < stored.answers.size(); ++i) {
        const auto& q = bank.items()[i];
        ReportLine line{q.index, q.text, stored.answers[i], score_item(stored.answers[i], q.direction)};
        (q.direction == Direction::Direct ? report.direct : report.inverse).push_back(std::move(line));
    }
    return report;
}

PrintableReport printable_report(const Store& store, const QuestionBank& bank, std::int64_t questionnaire_no) {
    auto stored = store.find_result(questionnaire_no);
    if (!stored) throw Error(ErrorCode::NotFound, "no questionnaire " + std::to_string(questionnaire_no));
    return printable_report(*stored, bank);
}

std::string render_report_html(const PrintableReport& report) {
    std::ostringstream html;
    html << "<!DOCTYPE html>\n<html lang=\"ro\">\n<head>\n<meta charset=\"utf-8\">\n"
         << "<title>Chestionar nr. " << report.questionnaire_no << "</title>\n"
         << "<style>\nbody{font-family:serif;margin:2em}\n"
         << ".groups{display:flex;gap:2em;align-items:flex-start}\n"
         << "table{border-collapse:collapse}td,th{border:1px solid #000;padding:2px 8px}\n"
         << "@media print{.noprint{display:none}}\n</style>\n</head>\n<body>\n"
         << "<header>\n<p>Chestionar nr.: " << report.questionnaire_no << "</p>\n"
         << "<p>Cadru didactic evaluat: " << html_escape(report.teacher_display_name) << "</p>\n"
         << "<p>Data evaluării: <time datetime=\"" << to_iso8601(report.completed_at) << "\">"
         << to_iso8601(report.completed_at) << "</time></p>\n";
    if (report.demo) html << "<p>DEMO</p>\n";
    html << "</header>\n<div class=\"groups\">\n";
    render_group(html, "Întrebări cu cotare directă", report.direct);
    render_group(html, "Întrebări cu cotare inversă", report.inverse);
    html << "</div>\n</body>\n</html>\n";
    return html.str();
}

std::string export_results_tsv(const std::vector<ResultRow>& rows, int total) {
    std::ostringstream out;
    out << "questionnaire_no\tdemo\tcompleted_at\tteacher";
    for (int i = 1; i <= total; ++i) out << "\te" << i;
    for (int i = 1; i <= total; ++i) out << "\ts" << i;
    out << '\n';
    for (const auto& row : rows) {
        out << row.questionnaire_no << '\t' << (row.demo ? "DEMO" : "") << '\t' << to_iso8601(row.completed_at)
            << '\t' << tsv_field(row.teacher_display_name);
        for (int v : row.raw_answers) out << '\t' << v;
        for (int v : row.scored_answers) out << '\t' << v;
        out << '\n';
    }
    return out.str();
}

} // namespace teacheval
