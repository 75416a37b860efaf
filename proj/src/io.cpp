#include "ggp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "ggp/errors.hpp"

namespace ggp {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

double parse_double_field(std::string_view raw, std::size_t line) {
    const std::string_view s = trim(raw);
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ParseError("expected a number, got '" + std::string(raw) + "'", line);
    return v;
}

template <class Int>
Int parse_int_field(std::string_view raw, std::size_t line) {
    const std::string_view s = trim(raw);
    Int v{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ParseError("expected an integer, got '" + std::string(raw) + "'", line);
    return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open input file: " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::invalid_argument("cannot open output file: " + path.string());
    return out;
}

// newline is excluded from the single-line error field
std::string sanitize_error(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

constexpr std::string_view kResultsHeader =
    "scheme,function,trial,seed,rmse,active_size,active_fraction,wall_time_s,error";

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        return "nan";
    return std::string(buf, ptr);
}

Dataset parse_dataset_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line))
        throw ParseError("missing header row", 1);
    ++lineno;
    const auto header = split(trim(line), ',');
    if (header.size() < 2 || trim(header.back()) != "y")
        throw ParseError("header must name columns x1[,x2,...],y", lineno);
    const Eigen::Index dim = static_cast<Eigen::Index>(header.size()) - 1;
    for (Eigen::Index i = 0; i < dim; ++i) {
        const std::string expected = "x" + std::to_string(i + 1);
        if (trim(header[static_cast<std::size_t>(i)]) != expected)
            throw ParseError("header must name columns x1[,x2,...],y", lineno);
    }

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty())
            continue;
        const auto fields = split(line, ',');
        if (static_cast<Eigen::Index>(fields.size()) != dim + 1)
            throw ParseError("expected " + std::to_string(dim + 1) + " fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        std::vector<double> row(fields.size());
        for (std::size_t k = 0; k < fields.size(); ++k)
            row[k] = parse_double_field(fields[k], lineno);
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError("no data rows", lineno + 1);

    Dataset d;
    d.inputs.resize(static_cast<Eigen::Index>(rows.size()), dim);
    d.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (Eigen::Index j = 0; j < dim; ++j)
            d.inputs(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
        d.targets(static_cast<Eigen::Index>(i)) = rows[i][static_cast<std::size_t>(dim)];
    }
    d.validate();
    return d;
}

Dataset parse_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    return parse_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& d) {
    d.validate();
    for (Eigen::Index j = 0; j < d.dim(); ++j)
        out << "x" << (j + 1) << ",";
    out << "y\n";
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        for (Eigen::Index j = 0; j < d.dim(); ++j)
            out << format_double(d.inputs(i, j)) << ",";
        out << format_double(d.targets(i)) << "\n";
    }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& d) {
    std::ofstream out = open_output(path);
    write_dataset_csv(out, d);
}

void write_hypers_record(std::ostream& out, const HypersRecord& rec) {
    out << "signal_variance=" << format_double(rec.hypers.signal_variance) << "\n"
        << "lengthscale=" << format_double(rec.hypers.lengthscale) << "\n"
        << "noise_variance=" << format_double(rec.hypers.noise_variance) << "\n"
        << "lml=" << format_double(rec.lml) << "\n"
        << "subset_size=" << rec.subset_size << "\n"
        << "seed=" << rec.seed << "\n";
}

void write_hypers_record(const std::filesystem::path& path, const HypersRecord& rec) {
    std::ofstream out = open_output(path);
    write_hypers_record(out, rec);
}

HypersRecord parse_hypers_record(std::istream& in) {
    HypersRecord rec;
    bool seen[6] = {};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view sv = trim(line);
        if (sv.empty())
            continue;
        const std::size_t eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected key=value", lineno);
        const std::string_view key = trim(sv.substr(0, eq));
        const std::string_view value = sv.substr(eq + 1);
        if (key == "signal_variance") {
            rec.hypers.signal_variance = parse_double_field(value, lineno);
            seen[0] = true;
        } else if (key == "lengthscale") {
            rec.hypers.lengthscale = parse_double_field(value, lineno);
            seen[1] = true;
        } else if (key == "noise_variance") {
            rec.hypers.noise_variance = parse_double_field(value, lineno);
            seen[2] = true;
        } else if (key == "lml") {
            rec.lml = parse_double_field(value, lineno);
            seen[3] = true;
        } else if (key == "subset_size") {
            rec.subset_size = parse_int_field<Eigen::Index>(value, lineno);
            seen[4] = true;
        } else if (key == "seed") {
            rec.seed = parse_int_field<std::uint64_t>(value, lineno);
            seen[5] = true;
        } else {
            throw ParseError("unknown key '" + std::string(key) + "'", lineno);
        }
    }
    for (bool s : seen)
        if (!s)
            throw ParseError("incomplete hyperparameters record", lineno + 1);
    return rec;
}

HypersRecord parse_hypers_record(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    return parse_hypers_record(in);
}

// point_index is the 1-based row number of the training point
void write_trace_csv(std::ostream& out, const std::vector<StageRecord>& trace) {
    out << "stage,point_index,delta_score,mu,std\n";
    for (const StageRecord& rec : trace) {
        for (std::size_t p = 0; p < rec.remainder.size(); ++p) {
            const auto q = static_cast<Eigen::Index>(p);
            out << rec.stage << "," << (rec.remainder[p] + 1) << ","
                << format_double(rec.delta(q)) << "," << format_double(rec.mu(q)) << ","
                << format_double(std::sqrt(rec.sigma_diag(q))) << "\n";
        }
    }
}

void write_rmse_history_csv(std::ostream& out, const std::vector<double>& history) {
    out << "stage,rmse\n";
    for (std::size_t t = 0; t < history.size(); ++t)
        out << (t + 1) << "," << format_double(history[t]) << "\n";
}

void write_active_set_csv(std::ostream& out, const std::vector<Eigen::Index>& active) {
    out << "stage,point_index\n";
    for (std::size_t t = 0; t < active.size(); ++t)
        out << (t + 1) << "," << (active[t] + 1) << "\n";
}

void write_results_csv(std::ostream& out, const std::vector<TrialRow>& rows) {
    out << kResultsHeader << "\n";
    for (const TrialRow& r : rows) {
        out << r.scheme << "," << r.function << "," << r.trial << "," << r.seed << ","
            << format_double(r.rmse) << "," << r.active_size << ","
            << format_double(r.active_fraction) << "," << format_double(r.wall_time_s) << ","
            << sanitize_error(r.error) << "\n";
    }
}

void write_results_csv(const std::filesystem::path& path, const std::vector<TrialRow>& rows) {
    std::ofstream out = open_output(path);
    write_results_csv(out, rows);
}

std::vector<TrialRow> parse_results_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line))
        throw ParseError("missing header row", 1);
    ++lineno;
    if (trim(line) != kResultsHeader)
        throw ParseError("unexpected results header", lineno);

    std::vector<TrialRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view sv = trim(line);
        if (sv.empty())
            continue;
        // the error field is last and unescaped: split only the first 8 commas
        std::vector<std::string_view> fields;
        std::string_view rest = sv;
        for (int k = 0; k < 8; ++k) {
            const std::size_t pos = rest.find(',');
            if (pos == std::string_view::npos)
                throw ParseError("expected 9 fields", lineno);
            fields.push_back(rest.substr(0, pos));
            rest.remove_prefix(pos + 1);
        }
        TrialRow r;
        r.scheme = std::string(trim(fields[0]));
        r.function = std::string(trim(fields[1]));
        r.trial = parse_int_field<int>(fields[2], lineno);
        r.seed = parse_int_field<std::uint64_t>(fields[3], lineno);
        r.rmse = parse_double_field(fields[4], lineno);
        r.active_size = parse_int_field<Eigen::Index>(fields[5], lineno);
        r.active_fraction = parse_double_field(fields[6], lineno);
        r.wall_time_s = parse_double_field(fields[7], lineno);
        r.error = std::string(rest);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<TrialRow> parse_results_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    return parse_results_csv(in);
}

std::string render_summary_table(const std::vector<FunctionSummary>& summary) {
    auto fixed2 = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };

    std::ostringstream out;
    out << "function                              full_gp    random greedy_gp  % of full dataset\n";
    for (const FunctionSummary& s : summary) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-36s %9s %9s %9s %18s\n", s.function.c_str(),
                      fixed2(s.full_rmse_median).c_str(), fixed2(s.random_rmse_median).c_str(),
                      fixed2(s.greedy_rmse_median).c_str(),
                      (std::isnan(s.active_fraction_median)
                           ? std::string("nan")
                           : std::to_string(static_cast<long>(
                                 std::lround(100.0 * s.active_fraction_median))) + "%")
                          .c_str());
        out << line;
    }
    for (const FunctionSummary& s : summary)
        if (s.failed_trials > 0)
            out << "# " << s.function << ": " << s.failed_trials << "/" << s.trials
                << " trials failed\n";
    return out.str();
}

} // namespace ggp
