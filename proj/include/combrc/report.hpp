#pragma once

// Persistence of result records: JSON summary (readable back for
// regeneration), long-format CSVs, the optimisation history, a JSON-lines
// phase log and SVG line plots.

#include "combrc/config.hpp"
#include "combrc/error.hpp"
#include "combrc/harness.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace combrc::harness {

namespace detail {

inline nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline double number_or(const nlohmann::json& j, double fallback)
{
    return j.is_number() ? j.get<double>() : fallback;
}

inline std::vector<double> numbers_or(const nlohmann::json& j, double fallback)
{
    std::vector<double> out;
    for (const auto& v : j)
        out.push_back(number_or(v, fallback));
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << text;
    if (!out)
        throw DataError("write failed for " + path.string());
}

inline std::string csv_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

}  // namespace detail

inline const char* to_string(RecordKind k) { return k == RecordKind::run ? "run" : "omega_point"; }

inline nlohmann::json to_json(const ResultRecord& r)
{
    using nlohmann::json;
    json scores = json::array();
    for (const auto& s : r.scores) {
        json folds = json::array();
        for (double v : s.cv.fold_scores)
            folds.push_back(detail::finite_or_null(v));
        scores.push_back({{"name", s.name},
                          {"mean", detail::finite_or_null(s.cv.mean)},
                          {"stddev", detail::finite_or_null(s.cv.stddev)},
                          {"fold_scores", folds},
                          {"lambdas", s.cv.lambdas}});
    }
    json j{{"kind", to_string(r.kind)},
           {"config_hash", r.config_hash},
           {"version", r.version},
           {"seed", r.seed},
           {"metric", combrc::to_string(r.metric)},
           {"omega_ghz", r.omega_ghz},
           {"scores", scores},
           {"timing_s",
            {{"physics", r.timing.physics},
             {"dynamics", r.timing.dynamics},
             {"training", r.timing.training},
             {"optimization", r.timing.optimization}}},
           {"config", combrc::to_json(r.config)}};
    j["persistence_nmse"] = r.persistence_nmse ? json(*r.persistence_nmse) : json(nullptr);
    j["objective_score"] = r.objective_score ? detail::finite_or_null(*r.objective_score) : json(nullptr);
    if (r.interlayer_db) {
        json db = json::array();
        for (double v : *r.interlayer_db)
            db.push_back(detail::finite_or_null(v));
        j["interlayer_db"] = db;
    } else {
        j["interlayer_db"] = nullptr;
    }
    return j;
}

/// Reads back a record written by to_json (history and timing excluded
/// from the comparison contract, but timing is restored).
inline ResultRecord record_from_json(const nlohmann::json& j)
{
    ResultRecord r;
    try {
        r.kind = j.at("kind").get<std::string>() == "omega_point" ? RecordKind::omega_point : RecordKind::run;
        r.config_hash = j.at("config_hash").get<std::string>();
        r.version = j.at("version").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.metric = j.at("metric").get<std::string>() == "ser" ? Metric::ser : Metric::nmse;
        r.omega_ghz = j.at("omega_ghz").get<double>();
        for (const auto& s : j.at("scores")) {
            ScoreEntry e;
            e.name = s.at("name").get<std::string>();
            e.cv.mean = detail::number_or(s.at("mean"), std::numeric_limits<double>::quiet_NaN());
            e.cv.stddev = detail::number_or(s.at("stddev"), std::numeric_limits<double>::quiet_NaN());
            e.cv.fold_scores = detail::numbers_or(s.at("fold_scores"), std::numeric_limits<double>::quiet_NaN());
            e.cv.lambdas = s.at("lambdas").get<std::vector<double>>();
            r.scores.push_back(std::move(e));
        }
        const auto& t = j.at("timing_s");
        r.timing = {t.at("physics").get<double>(), t.at("dynamics").get<double>(), t.at("training").get<double>(),
                    t.at("optimization").get<double>()};
        if (!j.at("persistence_nmse").is_null())
            r.persistence_nmse = j.at("persistence_nmse").get<double>();
        if (!j.at("objective_score").is_null())
            r.objective_score = j.at("objective_score").get<double>();
        if (!j.at("interlayer_db").is_null())
            r.interlayer_db = detail::numbers_or(j.at("interlayer_db"), -std::numeric_limits<double>::infinity());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed result record: ") + e.what());
    }
    r.config = config_from_json(j.at("config"));
    return r;
}

inline nlohmann::json summary_json(const std::string& command, const std::vector<ResultRecord>& records,
                                   const std::optional<SweepOutcome>& sweep = std::nullopt)
{
    nlohmann::json j{{"command", command}, {"version", version()}, {"n_records", records.size()}};
    j["records"] = nlohmann::json::array();
    for (const auto& r : records)
        j["records"].push_back(to_json(r));
    if (sweep) {
        j["axis"] = to_string(sweep->axis);
        j["values"] = sweep->values;
    }
    return j;
}

inline std::vector<ResultRecord> load_summary(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    std::vector<ResultRecord> out;
    for (const auto& r : j.at("records"))
        out.push_back(record_from_json(r));
    return out;
}

/// Long format: one row per (point, score entry).
inline std::string points_csv(const std::vector<ResultRecord>& records, const std::optional<SweepOutcome>& sweep)
{
    std::ostringstream s;
    s << "point,axis,value,omega_ghz,name,metric,mean,stddev,n_folds,config_hash\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        for (const auto& e : r.scores) {
            s << i << ',' << (sweep ? to_string(sweep->axis) : "") << ','
              << (sweep ? detail::csv_number(sweep->values[i]) : "") << ',' << detail::csv_number(r.omega_ghz) << ','
              << e.name << ',' << combrc::to_string(r.metric) << ',' << detail::csv_number(e.cv.mean) << ','
              << detail::csv_number(e.cv.stddev) << ',' << e.cv.fold_scores.size() << ',' << r.config_hash << '\n';
        }
    }
    return s.str();
}

/// Wide format for the line-spacing scan: one row per grid point.
inline std::string omega_scan_csv(const SweepOutcome& scan)
{
    std::ostringstream s;
    s << "detuning_ghz,omega_ghz,band1_mean,band1_std,band2_mean,band2_std\n";
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
        const auto& r = scan.points[i];
        s << detail::csv_number(scan.values[i]) << ',' << detail::csv_number(r.omega_ghz);
        for (const auto& e : r.scores)
            s << ',' << detail::csv_number(e.cv.mean) << ',' << detail::csv_number(e.cv.stddev);
        s << '\n';
    }
    return s.str();
}

inline std::string history_csv(const std::vector<ResultRecord>& records)
{
    std::size_t width = 0;
    for (const auto& r : records)
        if (r.history)
            for (const auto& row : r.history->rows)
                width = std::max(width, row.weights_db.size());
    std::ostringstream s;
    s << "point,evaluation_index,generation,score";
    for (std::size_t k = 0; k < width; ++k)
        s << ",weights_db_" << k;
    s << ",error\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].history)
            continue;
        for (const auto& row : records[i].history->rows) {
            s << i << ',' << row.evaluation_index << ',' << row.generation << ',' << detail::csv_number(row.score);
            for (double w : row.weights_db)
                s << ',' << detail::csv_number(w);
            std::string err = row.error;
            std::replace(err.begin(), err.end(), '"', '\'');
            s << ",\"" << err << "\"\n";
        }
    }
    return s.str();
}

inline std::string log_jsonl(const std::string& command, const std::vector<ResultRecord>& records)
{
    std::ostringstream s;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const std::pair<const char*, double> phases[] = {{"physics", r.timing.physics},
                                                         {"dynamics", r.timing.dynamics},
                                                         {"training", r.timing.training},
                                                         {"optimization", r.timing.optimization}};
        for (const auto& [phase, seconds] : phases)
            s << nlohmann::json{{"command", command}, {"point", i}, {"config_hash", r.config_hash},
                                {"phase", phase}, {"seconds", seconds}}
                     .dump()
              << '\n';
        for (const auto& e : r.scores)
            s << nlohmann::json{{"command", command}, {"point", i}, {"event", "score"}, {"name", e.name},
                                {"mean", detail::finite_or_null(e.cv.mean)},
                                {"stddev", detail::finite_or_null(e.cv.stddev)}}
                     .dump()
              << '\n';
    }
    return s.str();
}

// ---------------------------------------------------------------------------
// SVG

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> err;  ///< optional symmetric error bars
};

/// Minimal static line plot. Non-finite points are skipped; with log_y,
/// non-positive values are skipped too.
inline std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                                 const std::vector<PlotSeries>& series, bool log_y = false)
{
    constexpr double width = 640, height = 420, left = 70, right = 20, top = 40, bottom = 60;
    static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
    auto usable = [&](double v) { return std::isfinite(v) && (!log_y || v > 0.0); };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.y[i]) || !std::isfinite(s.x[i]))
                continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            const double e = i < s.err.size() && std::isfinite(s.err[i]) ? s.err[i] : 0.0;
            const double lo = usable(s.y[i] - e) ? s.y[i] - e : s.y[i];
            y0 = std::min(y0, ty(lo));
            y1 = std::max(y1, ty(s.y[i] + e));
        }
    if (!std::isfinite(x0)) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    if (x1 == x0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (y1 == y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * (width - left - right); };
    auto py = [&](double v) { return height - bottom - (ty(v) - y0) / (y1 - y0) * (height - top - bottom); };
    auto fmt = [](double v) {
        std::ostringstream s;
        s << std::setprecision(4) << v;
        return s.str();
    };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
      << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = x0 + (x1 - x0) * t / 4.0;
        const double yv = y0 + (y1 - y0) * t / 4.0;
        const double yy = height - bottom - (yv - y0) / (y1 - y0) * (height - top - bottom);
        s << "<text x=\"" << px(xv) << "\" y=\"" << height - bottom + 18 << "\" text-anchor=\"middle\">" << fmt(xv)
          << "</text>\n";
        s << "<text x=\"" << left - 6 << "\" y=\"" << yy + 4 << "\" text-anchor=\"end\">"
          << fmt(log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
        s << "<line x1=\"" << left << "\" y1=\"" << yy << "\" x2=\"" << width - right << "\" y2=\"" << yy
          << "\" stroke=\"#ddd\"/>\n";
    }
    s << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 18 << "\" text-anchor=\"middle\">"
      << x_label << "</text>\n";
    s << "<text transform=\"translate(16," << (top + height - bottom) / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << y_label << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& ser = series[k];
        const char* color = colors[k % std::size(colors)];
        std::ostringstream pts;
        for (std::size_t i = 0; i < ser.x.size(); ++i) {
            if (!usable(ser.y[i]) || !std::isfinite(ser.x[i]))
                continue;
            pts << px(ser.x[i]) << ',' << py(ser.y[i]) << ' ';
            s << "<circle cx=\"" << px(ser.x[i]) << "\" cy=\"" << py(ser.y[i]) << "\" r=\"3\" fill=\"" << color
              << "\"/>\n";
            if (i < ser.err.size() && std::isfinite(ser.err[i]) && ser.err[i] > 0.0) {
                const double lo = usable(ser.y[i] - ser.err[i]) ? ser.y[i] - ser.err[i] : ser.y[i];
                s << "<line x1=\"" << px(ser.x[i]) << "\" y1=\"" << py(lo) << "\" x2=\"" << px(ser.x[i])
                  << "\" y2=\"" << py(ser.y[i] + ser.err[i]) << "\" stroke=\"" << color << "\"/>\n";
            }
        }
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str()
          << "\"/>\n";
        s << "<text x=\"" << width - right - 90 << "\" y=\"" << top + 14 * (k + 1) << "\" fill=\"" << color << "\">"
          << ser.name << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

/// Writes every artifact of one command into `dir`:
/// effective_config.json, summary.json, points.csv, log.jsonl, and when
/// relevant history.csv, omega_scan.csv and plot.svg.
inline std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const std::string& command,
                                                        const ExperimentConfig& effective,
                                                        const std::vector<ResultRecord>& records,
                                                        const std::optional<SweepOutcome>& sweep, bool plot)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<fs::path> written;
    auto put = [&](const std::string& name, const std::string& text) {
        detail::write_text(dir / name, text);
        written.push_back(dir / name);
    };
    put("effective_config.json", serialize(effective) + "\n");
    put("summary.json", summary_json(command, records, sweep).dump(2) + "\n");
    put("points.csv", points_csv(records, sweep));
    put("log.jsonl", log_jsonl(command, records));
    const bool any_history =
        std::any_of(records.begin(), records.end(), [](const ResultRecord& r) { return r.history.has_value(); });
    if (any_history)
        put("history.csv", history_csv(records));
    if (sweep && command == "omega-scan")
        put("omega_scan.csv", omega_scan_csv(*sweep));

    if (!plot)
        return written;
    const std::string metric = records.empty() ? "score" : combrc::to_string(records.front().metric);
    const bool log_y = !records.empty() && records.front().metric == Metric::ser;
    if (sweep) {
        std::vector<PlotSeries> series;
        for (std::size_t i = 0; i < sweep->points.size(); ++i) {
            for (std::size_t e = 0; e < sweep->points[i].scores.size(); ++e) {
                if (series.size() <= e)
                    series.push_back({sweep->points[i].scores[e].name, {}, {}, {}});
                const double x = sweep->axis == SweepAxis::omega_detuning ? sweep->points[i].omega_ghz
                                                                          : sweep->values[i];
                series[e].x.push_back(x);
                series[e].y.push_back(sweep->points[i].scores[e].cv.mean);
                series[e].err.push_back(sweep->points[i].scores[e].cv.stddev);
            }
        }
        const std::string x_label = sweep->axis == SweepAxis::snr_db ? "SNR (dB)"
                                    : sweep->axis == SweepAxis::tau  ? "tau"
                                                                     : "line spacing (GHz)";
        put("plot.svg", svg_line_plot(metric + " vs " + x_label, x_label, metric, series, log_y));
    } else if (!records.empty() && records.front().history
               && records.front().history->strategy == InterlayerStrategy::uniform_sweep) {
        PlotSeries s{"holdout", {}, {}, {}};
        for (const auto& row : records.front().history->rows) {
            s.x.push_back(row.weights_db.empty() ? 0.0 : row.weights_db.front());
            s.y.push_back(row.score);
        }
        put("plot.svg", svg_line_plot("deep " + metric + " vs attenuation", "attenuation (dB)", metric, {s}, log_y));
    } else if (!records.empty() && records.front().history) {
        PlotSeries s{"best so far", {}, {}, {}};
        for (std::size_t g = 0; g < records.front().history->best_ever.size(); ++g) {
            s.x.push_back(static_cast<double>(g));
            s.y.push_back(records.front().history->best_ever[g]);
        }
        put("plot.svg", svg_line_plot("CMA-ES progress", "generation", metric, {s}, log_y));
    }
    return written;
}

}  // namespace combrc::harness
