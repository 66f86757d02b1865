// Copyright 2026-present The Branchlake Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "branchlake/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "branchlake/error.hpp"
#include "branchlake/table_io.hpp"

namespace branchlake::bench {

using engine::EngineKind;

void validate(const BenchConfig& c) {
    auto bad = [](const std::string& msg) { raise(ErrorCode::kBadConfig, msg); };
    if (c.branch_counts.empty()) bad("at least one branch count is required");
    for (auto b : c.branch_counts) {
        if (b < 1) bad(fmt::format("branch counts must be positive, got {}", b));
    }
    if (c.repeats < 1) bad("repeats must be at least 1");
    if (c.warmups < 0) bad("warmups cannot be negative");
    if (c.questions.empty()) bad("at least one question is required");
    if (c.engines.empty()) bad("at least one engine is required");
    std::set<std::string> ids;
    for (const auto& q : c.questions) {
        if (!ids.insert(q.id()).second) bad(fmt::format("{} listed twice", q.id()));
    }
}

double median(std::vector<double> v) {
    if (v.empty()) raise(ErrorCode::kBadParameter, "median of nothing");
    std::ranges::sort(v);
    auto n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

const MedianRow& BenchResults::median(const std::string& question, EngineKind engine, std::int64_t branches) const {
    for (const auto& m : medians) {
        if (m.question == question && m.engine == engine && m.branches == branches) return m;
    }
    raise(ErrorCode::kBadParameter,
          fmt::format("no median for {} / {} / B={}", question, engine::engine_name(engine), branches));
}

namespace {

void check_agreement(const question::QuerySpec& spec, const catalog::CatalogSnapshot& snap,
                     const std::vector<std::string>& branches) {
    auto adhoc = engine::run_adhoc(spec, snap, branches);
    auto native = engine::run_native(spec, snap, branches);
    if (!(*adhoc.table == *native.table)) {
        raise(ErrorCode::kEngineMismatch,
              fmt::format("{} at B={}: native and ad hoc results differ", spec.id(), branches.size()));
    }
    if (spec.result_kind() == question::ResultKind::kBoolean) {
        auto full = std::get<engine::BooleanOverlay>(engine::build_overlay(spec, *adhoc.table, branches)).verdict;
        auto sc = engine::run_boolean_shortcircuit(spec, snap, branches).verdict;
        if (full != sc) {
            raise(ErrorCode::kEngineMismatch, fmt::format("{} at B={}: short-circuit verdict {} but full verdict {}",
                                                          spec.id(), branches.size(), superval::verdict_name(sc),
                                                          superval::verdict_name(full)));
        }
    }
}

}  // namespace

BenchResults run_bench(const BenchConfig& config, const catalog::CatalogSnapshot& snapshot) {
    validate(config);
    auto max_b = static_cast<std::size_t>(std::ranges::max(config.branch_counts));
    BenchResults results;
    for (const auto& spec : config.questions) {
        auto eligible = engine::default_branches(snapshot.manifest(), spec);
        if (eligible.size() < max_b) {
            raise(ErrorCode::kBadConfig, fmt::format("{} needs {} branches but the catalog has {} eligible", spec.id(),
                                                     max_b, eligible.size()));
        }
        for (auto b : config.branch_counts) {
            std::vector<std::string> branches(eligible.begin(), eligible.begin() + b);
            if (config.progress) config.progress(fmt::format("{} B={}", spec.id(), b));
            check_agreement(spec, snapshot, branches);
            std::map<EngineKind, std::vector<double>> times;
            std::map<EngineKind, double> evaluated;
            for (auto e : config.engines) {
                for (std::int64_t w = 0; w < config.warmups; ++w) engine::run(spec, snapshot, branches, e);
                for (std::int64_t r = 1; r <= config.repeats; ++r) {
                    auto start = std::chrono::steady_clock::now();
                    auto res = engine::run(spec, snapshot, branches, e);
                    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
                    results.raw.push_back({spec.id(), e, b, r, ms});
                    times[e].push_back(ms);
                    evaluated[e] += static_cast<double>(res.report.branches_evaluated);
                }
            }
            for (auto e : config.engines) {
                results.medians.push_back(
                    {spec.id(), e, b, median(times[e]), evaluated[e] / static_cast<double>(config.repeats)});
            }
            if (times.contains(EngineKind::kAdHoc) && times.contains(EngineKind::kNative)) {
                double a = median(times[EngineKind::kAdHoc]);
                double n = median(times[EngineKind::kNative]);
                results.speedups.push_back({spec.id(), b, a, n, a / n});
            }
        }
    }
    return results;
}

namespace {

std::string num(double v) { return fmt::format("{:.3f}", v); }

std::vector<std::int64_t> branch_axis(const BenchResults& r) {
    std::set<std::int64_t> s;
    for (const auto& m : r.medians) s.insert(m.branches);
    return {s.begin(), s.end()};
}

std::vector<std::pair<std::string, EngineKind>> series_keys(const BenchResults& r) {
    std::vector<std::pair<std::string, EngineKind>> out;
    for (const auto& m : r.medians) {
        std::pair key{m.question, m.engine};
        if (std::ranges::find(out, key) == out.end()) out.push_back(key);
    }
    return out;
}

std::vector<std::string> question_ids(const BenchResults& r) {
    std::vector<std::string> out;
    for (const auto& m : r.medians) {
        if (std::ranges::find(out, m.question) == out.end()) out.push_back(m.question);
    }
    return out;
}

}  // namespace

std::vector<std::filesystem::path> write_results(const BenchResults& r, const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    auto emit = [&](const char* name, const std::string& text) {
        io::write_file(dir / name, text);
        out.push_back(dir / name);
    };

    std::string raw = "question,engine,branches,repeat,latency_ms\n";
    for (const auto& x : r.raw) {
        raw += fmt::format("{},{},{},{},{}\n", x.question, engine::engine_name(x.engine), x.branches, x.repeat,
                           num(x.latency_ms));
    }
    emit("raw.csv", raw);

    std::string med = "question,engine,branches,median_ms,branches_evaluated\n";
    for (const auto& m : r.medians) {
        med += fmt::format("{},{},{},{},{}\n", m.question, engine::engine_name(m.engine), m.branches, num(m.median_ms),
                           m.branches_evaluated);
    }
    emit("medians.csv", med);

    auto axis = branch_axis(r);
    std::string table = "question,engine";
    for (auto b : axis) table += fmt::format(",B={}", b);
    table += "\n";
    for (const auto& [q, e] : series_keys(r)) {
        table += fmt::format("{},{}", q, engine::engine_name(e));
        for (auto b : axis) {
            auto it = std::ranges::find_if(r.medians, [&](const auto& m) {
                return m.question == q && m.engine == e && m.branches == b;
            });
            table += it == r.medians.end() ? "," : "," + num(it->median_ms);
        }
        table += "\n";
    }
    emit("table.csv", table);

    std::string sp = "question,branches,adhoc_median_ms,native_median_ms,speedup\n";
    for (const auto& s : r.speedups) {
        sp += fmt::format("{},{},{},{},{}\n", s.question, s.branches, num(s.adhoc_ms), num(s.native_ms), num(s.speedup));
    }
    emit("speedup.csv", sp);
    return out;
}

std::string format_table(const BenchResults& r) {
    auto axis = branch_axis(r);
    std::string out = "| Query | Engine |";
    for (auto b : axis) out += fmt::format(" B={} |", b);
    out += "\n|---|---|";
    for (std::size_t i = 0; i < axis.size(); ++i) out += "---:|";
    out += "\n";
    for (const auto& [q, e] : series_keys(r)) {
        out += fmt::format("| {} | {} |", q, engine::engine_name(e));
        for (auto b : axis) {
            auto it = std::ranges::find_if(r.medians, [&](const auto& m) {
                return m.question == q && m.engine == e && m.branches == b;
            });
            out += it == r.medians.end() ? " |" : fmt::format(" {:.2f} |", it->median_ms);
        }
        out += "\n";
    }
    return out;
}

namespace {

struct Series {
    std::string name;
    std::string color;
    std::vector<std::pair<double, double>> points;
};

constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

// Latency spans orders of magnitude across engines, so that chart uses a
// log10 y axis; speedups are plotted linearly.
std::string line_chart(const std::string& title, const std::string& y_label, const std::vector<Series>& series,
                       bool log_y) {
    double x_max = 1, y_min = std::numeric_limits<double>::infinity(), y_max = 0;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    auto ty = [&](double y) { return log_y ? std::log10(std::max(y, 1e-6)) : y; };
    double lo = log_y ? std::floor(ty(y_min)) : 0.0;
    double hi = log_y ? std::ceil(ty(y_max)) : std::max(1.0, y_max * 1.1);
    if (hi <= lo) hi = lo + 1;
    double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x / x_max) * pw; };
    auto py = [&](double y) { return kTop + ph - (ty(y) - lo) / (hi - lo) * ph; };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{2}\" y=\"20\" font-size=\"14\">{3}</text>\n",
        kWidth, kHeight, kLeft, escape(title));
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", kLeft, kTop + ph,
                       kLeft + pw);
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", kLeft, kTop, kTop + ph);
    std::set<double> xs;
    for (const auto& s : series) {
        for (const auto& p : s.points) xs.insert(p.first);
    }
    for (double x : xs) {
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", px(x), kTop + ph + 16, x);
    }
    int ticks = log_y ? static_cast<int>(hi - lo) : 5;
    for (int i = 0; i <= ticks; ++i) {
        double t = lo + (hi - lo) * i / ticks;
        double value = log_y ? std::pow(10.0, t) : t;
        double y = kTop + ph - (t - lo) / (hi - lo) * ph;
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", kLeft - 6, y + 4,
                           fmt::format("{:g}", value));
        svg += fmt::format("<line x1=\"{0}\" y1=\"{1:.1f}\" x2=\"{2}\" y2=\"{1:.1f}\" stroke=\"#ddd\"/>\n", kLeft, y,
                           kLeft + pw);
    }
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">branches (B)</text>\n", kLeft + pw / 2,
                       kHeight - 10);
    svg += fmt::format("<text x=\"16\" y=\"{0:.1f}\" transform=\"rotate(-90 16 {0:.1f})\" "
                       "text-anchor=\"middle\">{1}</text>\n",
                       kTop + ph / 2, escape(y_label));
    int legend_row = 0;
    for (const auto& s : series) {
        if (s.points.empty()) continue;
        std::vector<std::string> pts;
        for (const auto& [x, y] : s.points) pts.push_back(fmt::format("{:.1f},{:.1f}", px(x), py(y)));
        svg += fmt::format("<polyline data-series=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
                           escape(s.name), s.color, fmt::join(pts, " "));
        double ly = kTop + 10 + 18 * legend_row++;
        svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>"
                           "<text class=\"legend\" x=\"{4}\" y=\"{5}\">{6}</text>\n",
                           kWidth - kRight + 10, ly, kWidth - kRight + 30, s.color, kWidth - kRight + 36, ly + 4,
                           escape(s.name));
    }
    svg += "</svg>\n";
    return svg;
}

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string bar(double value, double max, int width) {
    int n = max > 0 ? static_cast<int>(std::lround(value / max * width)) : 0;
    return std::string(static_cast<std::size_t>(std::clamp(n, 0, width)), '#');
}

}  // namespace

Plots emit_plots(const BenchResults& r, const std::filesystem::path& dir) {
    if (r.medians.empty()) raise(ErrorCode::kBadParameter, "no bench results to plot");
    Plots plots;
    for (const auto& q : question_ids(r)) {
        std::vector<Series> series;
        int color = 0;
        double max_ms = 0;
        for (auto e : {EngineKind::kAdHoc, EngineKind::kNative}) {
            Series s{std::string(engine::engine_name(e)), kColors[color++], {}};
            for (const auto& m : r.medians) {
                if (m.question == q && m.engine == e) {
                    s.points.emplace_back(static_cast<double>(m.branches), m.median_ms);
                    max_ms = std::max(max_ms, m.median_ms);
                }
            }
            series.push_back(std::move(s));
        }
        auto path = dir / fmt::format("latency_{}.svg", q);
        io::write_file(path, line_chart(fmt::format("{}: median latency vs. branches", q), "median latency (ms, log)",
                                        series, true));
        plots.files.push_back(path);

        plots.ascii += fmt::format("{} median latency (ms)\n", q);
        for (const auto& s : series) {
            for (const auto& [b, ms] : s.points) {
                plots.ascii += fmt::format("  {:<6} B={:<3} {:>10.2f} {}\n", s.name, b, ms, bar(ms, max_ms, 40));
            }
        }
    }

    std::vector<Series> speed;
    int color = 0;
    double max_speed = 0;
    for (const auto& q : question_ids(r)) {
        Series s{q, kColors[color++ % std::size(kColors)], {}};
        for (const auto& x : r.speedups) {
            if (x.question == q) {
                s.points.emplace_back(static_cast<double>(x.branches), x.speedup);
                max_speed = std::max(max_speed, x.speedup);
            }
        }
        speed.push_back(std::move(s));
    }
    auto path = dir / "speedup.svg";
    io::write_file(path, line_chart("Speedup (ad hoc / native) vs. branches", "speedup (x)", speed, false));
    plots.files.push_back(path);
    plots.ascii += "speedup (ad hoc / native)\n";
    for (const auto& s : speed) {
        for (const auto& [b, x] : s.points) {
            plots.ascii += fmt::format("  {:<6} B={:<3} {:>8.2f}x {}\n", s.name, b, x, bar(x, max_speed, 40));
        }
    }
    return plots;
}

}  // namespace branchlake::bench
