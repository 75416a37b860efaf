#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ggp/bench.hpp"
#include "ggp/dataset.hpp"
#include "ggp/greedy.hpp"
#include "ggp/kernel.hpp"

namespace ggp {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

// Dataset CSV: header "x1[,x2,...],y", one numeric row per point.
Dataset parse_dataset_csv(std::istream& in);
Dataset parse_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(std::ostream& out, const Dataset& d);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& d);

// Flat key=value record produced by hyperparameter fitting.
struct HypersRecord {
    Hyperparameters hypers;
    double lml = 0.0;
    Eigen::Index subset_size = 0;
    std::uint64_t seed = 0;
};

void write_hypers_record(std::ostream& out, const HypersRecord& rec);
void write_hypers_record(const std::filesystem::path& path, const HypersRecord& rec);
HypersRecord parse_hypers_record(std::istream& in);
HypersRecord parse_hypers_record(const std::filesystem::path& path);

// Per-stage trace: header "stage,point_index,delta_score,mu,std", one row
// per remainder point per stage.
void write_trace_csv(std::ostream& out, const std::vector<StageRecord>& trace);

// "stage,rmse" rows, stages numbered from 1.
void write_rmse_history_csv(std::ostream& out, const std::vector<double>& history);

// "stage,point_index" rows in selection order.
void write_active_set_csv(std::ostream& out, const std::vector<Eigen::Index>& active);

// Benchmark rows: header
// "scheme,function,trial,seed,rmse,active_size,active_fraction,wall_time_s,error".
// The error field is last and may contain anything but newlines.
void write_results_csv(std::ostream& out, const std::vector<TrialRow>& rows);
void write_results_csv(const std::filesystem::path& path, const std::vector<TrialRow>& rows);
std::vector<TrialRow> parse_results_csv(std::istream& in);
std::vector<TrialRow> parse_results_csv(const std::filesystem::path& path);

// Human-readable aggregate, 2-decimal medians and whole-percent active set.
std::string render_summary_table(const std::vector<FunctionSummary>& summary);

} // namespace ggp
