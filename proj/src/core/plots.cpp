#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/diff_engine.hpp"
#include "core/errors.hpp"

// CSV and SVG emission. Everything here is byte-deterministic for a fixed
// input: stable map iteration, fixed-precision formatting, no clocks.

namespace biasaudit {

namespace {

std::string csv_quote(const std::string& field) {
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string fmt_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::vector<std::string> parse_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io, "cannot write: " + path.string());
    out << content;
}

std::string join_key(const std::vector<std::string>& key) {
    std::string out;
    for (size_t i = 0; i < key.size(); ++i) {
        if (i) out += " / ";
        out += key[i];
    }
    return out;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct SvgBuilder {
    std::ostringstream out;

    void open(double width, double height) {
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_fixed(width, 0)
            << "\" height=\"" << fmt_fixed(height, 0) << "\" viewBox=\"0 0 " << fmt_fixed(width, 0)
            << " " << fmt_fixed(height, 0) << "\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& fill) {
        out << "<rect x=\"" << fmt_fixed(x, 2) << "\" y=\"" << fmt_fixed(y, 2) << "\" width=\""
            << fmt_fixed(w, 2) << "\" height=\"" << fmt_fixed(h, 2) << "\" fill=\"" << fill
            << "\"/>\n";
    }
    void text(double x, double y, const std::string& s, int size, const std::string& anchor,
              const std::string& extra = {}) {
        out << "<text x=\"" << fmt_fixed(x, 2) << "\" y=\"" << fmt_fixed(y, 2)
            << "\" font-family=\"sans-serif\" font-size=\"" << size << "\" text-anchor=\"" << anchor
            << "\"" << extra << ">" << xml_escape(s) << "</text>\n";
    }
    void line(double x1, double y1, double x2, double y2) {
        out << "<line x1=\"" << fmt_fixed(x1, 2) << "\" y1=\"" << fmt_fixed(y1, 2) << "\" x2=\""
            << fmt_fixed(x2, 2) << "\" y2=\"" << fmt_fixed(y2, 2)
            << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    }
    std::string close() {
        out << "</svg>\n";
        return out.str();
    }
};

constexpr const char* kStdColor = "#4878a8";
constexpr const char* kAnoColor = "#e08a3c";

std::string grouped_bar_svg(const DiffSummary& diff, const std::string& title) {
    const double band = 86.0;
    const double margin_left = 60.0, margin_right = 30.0, margin_top = 50.0, margin_bottom = 70.0;
    const double plot_h = 300.0;
    const double width = margin_left + margin_right + band * double(diff.rows.size());
    const double height = margin_top + plot_h + margin_bottom;

    long long max_v = 1;
    for (const auto& row : diff.rows) {
        max_v = std::max({max_v, row.std_value, row.ano_value});
    }

    SvgBuilder svg;
    svg.open(width, height);
    svg.text(width / 2.0, 24.0, title, 15, "middle", " font-weight=\"bold\"");

    // legend
    svg.rect(margin_left, 32.0, 12, 12, kStdColor);
    svg.text(margin_left + 16.0, 42.0, "standard", 11, "start");
    svg.rect(margin_left + 90.0, 32.0, 12, 12, kAnoColor);
    svg.text(margin_left + 106.0, 42.0, "anonymized", 11, "start");

    const double base_y = margin_top + plot_h;
    svg.line(margin_left - 10.0, base_y, width - margin_right, base_y);

    for (size_t i = 0; i < diff.rows.size(); ++i) {
        const auto& row = diff.rows[i];
        double x0 = margin_left + band * double(i);
        auto bar = [&](double offset, long long value, const char* color) {
            double h = plot_h * double(value) / double(max_v);
            double x = x0 + offset;
            svg.rect(x, base_y - h, 28.0, h, color);
            svg.text(x + 14.0, base_y - h - 4.0, std::to_string(value), 11, "middle");
        };
        bar(10.0, row.std_value, kStdColor);
        bar(44.0, row.ano_value, kAnoColor);
        svg.text(x0 + band / 2.0, base_y + 16.0, join_key(row.key), 11, "middle");
        if (row.pct_change) {
            svg.text(x0 + band / 2.0, base_y + 32.0, fmt_fixed(*row.pct_change, 3) + "%", 10,
                     "middle");
        }
    }
    return svg.close();
}

std::string bar_svg(const ScoreMatrix& matrix, const std::string& title) {
    const double band = 72.0;
    const double margin_left = 60.0, margin_right = 30.0, margin_top = 40.0, margin_bottom = 60.0;
    const double plot_h = 300.0;
    const double width = margin_left + margin_right + band * double(matrix.cells.size());
    const double height = margin_top + plot_h + margin_bottom;

    long long max_v = 1;
    for (const auto& [key, value] : matrix.cells) max_v = std::max(max_v, value);

    SvgBuilder svg;
    svg.open(width, height);
    svg.text(width / 2.0, 24.0, title, 15, "middle", " font-weight=\"bold\"");
    const double base_y = margin_top + plot_h;
    svg.line(margin_left - 10.0, base_y, width - margin_right, base_y);

    size_t i = 0;
    for (const auto& [key, value] : matrix.cells) {
        double x0 = margin_left + band * double(i);
        double h = plot_h * double(value) / double(max_v);
        svg.rect(x0 + 16.0, base_y - h, 36.0, h, kStdColor);
        svg.text(x0 + 34.0, base_y - h - 4.0, std::to_string(value), 11, "middle");
        svg.text(x0 + band / 2.0, base_y + 16.0, join_key(key), 11, "middle");
        ++i;
    }
    return svg.close();
}

std::string heatmap_svg(const HeatmapData& heatmap, const std::string& title) {
    const double cell_w = 96.0, cell_h = 40.0;
    const double margin_left = 130.0, margin_top = 70.0, margin_right = 20.0, margin_bottom = 20.0;
    const double width = margin_left + cell_w * double(heatmap.col_labels.size()) + margin_right;
    const double height = margin_top + cell_h * double(heatmap.row_labels.size()) + margin_bottom;

    double max_v = 0.0;
    for (const auto& row : heatmap.values) {
        for (double v : row) max_v = std::max(max_v, std::fabs(v));
    }
    if (max_v == 0.0) max_v = 1.0;

    SvgBuilder svg;
    svg.open(width, height);
    std::string full_title = title;
    if (!heatmap.mode_tag.empty()) full_title += " (" + heatmap.mode_tag + ")";
    svg.text(width / 2.0, 26.0, full_title, 15, "middle", " font-weight=\"bold\"");

    for (size_t c = 0; c < heatmap.col_labels.size(); ++c) {
        svg.text(margin_left + cell_w * (double(c) + 0.5), margin_top - 10.0, heatmap.col_labels[c],
                 11, "middle");
    }
    for (size_t r = 0; r < heatmap.row_labels.size(); ++r) {
        double y0 = margin_top + cell_h * double(r);
        svg.text(margin_left - 8.0, y0 + cell_h / 2.0 + 4.0, heatmap.row_labels[r], 11, "end");
        for (size_t c = 0; c < heatmap.values[r].size(); ++c) {
            double v = heatmap.values[r][c];
            // white -> warm red ramp on value magnitude
            double intensity = std::fabs(v) / max_v;
            int g = int(std::lround(255.0 - 155.0 * intensity));
            int b = int(std::lround(255.0 - 195.0 * intensity));
            char color[8];
            std::snprintf(color, sizeof(color), "#ff%02x%02x", g, b);
            double x0 = margin_left + cell_w * double(c);
            svg.rect(x0, y0, cell_w - 2.0, cell_h - 2.0, color);
            svg.text(x0 + (cell_w - 2.0) / 2.0, y0 + cell_h / 2.0 + 4.0, fmt_fixed(v, 4), 11,
                     "middle");
        }
    }
    return svg.close();
}

} // namespace

std::string matrix_to_csv(const ScoreMatrix& matrix) {
    std::ostringstream out;
    for (size_t i = 0; i < matrix.group_keys.size(); ++i) {
        out << csv_quote(group_key_name(matrix.group_keys[i])) << ",";
    }
    out << csv_quote("value") << "\n";
    for (const auto& [key, value] : matrix.cells) {
        for (const auto& part : key) out << csv_quote(part) << ",";
        out << csv_quote(std::to_string(value)) << "\n";
    }
    return out.str();
}

std::string diff_to_csv(const DiffSummary& diff) {
    std::ostringstream out;
    for (const auto& k : diff.group_keys) out << csv_quote(group_key_name(k)) << ",";
    out << csv_quote("std") << "," << csv_quote("ano") << "," << csv_quote("abs_diff") << ","
        << csv_quote("pct_change") << "\n";

    auto emit_row = [&](const DiffRow& row, bool totals) {
        for (size_t i = 0; i < diff.group_keys.size(); ++i) {
            if (totals) {
                out << csv_quote(i == 0 ? "TOTAL" : "") << ",";
            } else {
                out << csv_quote(row.key[i]) << ",";
            }
        }
        out << csv_quote(std::to_string(row.std_value)) << ","
            << csv_quote(std::to_string(row.ano_value)) << ","
            << csv_quote(std::to_string(row.abs_diff)) << ",";
        out << csv_quote(row.pct_change ? fmt_fixed(*row.pct_change, 3) : "") << "\n";
    };
    for (const auto& row : diff.rows) emit_row(row, false);
    emit_row(diff.totals, true);
    return out.str();
}

ScoreMatrix read_matrix_csv(const std::filesystem::path& path, MatrixProvenance provenance) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io, "cannot read csv: " + path.string());

    ScoreMatrix m;
    m.provenance = std::move(provenance);
    std::string line;
    if (!std::getline(in, line)) fail(errc::empty_data, "empty csv: " + path.string());
    auto header = parse_csv_line(line);
    if (header.size() < 2 || header.back() != "value") {
        fail(errc::invalid_argument, "matrix csv needs key columns plus a value column");
    }
    for (size_t i = 0; i + 1 < header.size(); ++i) {
        m.group_keys.push_back(group_key_from_name(header[i]));
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = parse_csv_line(line);
        if (fields.size() != header.size()) {
            fail(errc::invalid_argument, "csv row width mismatch in " + path.string());
        }
        std::vector<std::string> key(fields.begin(), fields.end() - 1);
        m.cells[std::move(key)] = std::stoll(fields.back());
    }
    return m;
}

std::filesystem::path emit_plot(const ScoreMatrix& matrix, PlotFormat format,
                                const std::filesystem::path& path, const std::string& title) {
    if (matrix.cells.empty()) fail(errc::empty_data, "emit_plot: empty matrix");
    write_file(path, format == PlotFormat::csv ? matrix_to_csv(matrix) : bar_svg(matrix, title));
    return path;
}

std::filesystem::path emit_plot(const DiffSummary& diff, PlotFormat format,
                                const std::filesystem::path& path, const std::string& title) {
    if (diff.rows.empty()) fail(errc::empty_data, "emit_plot: empty diff summary");
    write_file(path, format == PlotFormat::csv ? diff_to_csv(diff) : grouped_bar_svg(diff, title));
    return path;
}

std::filesystem::path emit_plot(const HeatmapData& heatmap, PlotFormat format,
                                const std::filesystem::path& path, const std::string& title) {
    if (heatmap.values.empty()) fail(errc::empty_data, "emit_plot: empty heatmap");
    if (format == PlotFormat::csv) {
        std::ostringstream out;
        out << csv_quote("");
        for (const auto& c : heatmap.col_labels) out << "," << csv_quote(c);
        out << "\n";
        for (size_t r = 0; r < heatmap.row_labels.size(); ++r) {
            out << csv_quote(heatmap.row_labels[r]);
            for (double v : heatmap.values[r]) out << "," << csv_quote(fmt_fixed(v, 4));
            out << "\n";
        }
        write_file(path, out.str());
    } else {
        write_file(path, heatmap_svg(heatmap, title));
    }
    return path;
}

} // namespace biasaudit
