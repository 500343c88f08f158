#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aki/dataset.hpp"

namespace aki {

struct CreatininePoint {
    double hours = 0.0;
    double value = 0.0; // mg/dL
};

struct StayRecord {
    std::string stay_id;
    std::string subject_id;
    double age_years = 0.0;
    double icu_los_hours = 0.0;
    int admission_seq = 1;
    std::vector<std::string> icd_codes;
    std::vector<CreatininePoint> creatinine_series; // sorted by hours
    std::map<std::string, std::optional<double>> raw_features;
    std::optional<int> explicit_label;
};

struct CohortTable {
    std::vector<StayRecord> records;
    // Row count after each funnel stage; stage 0 = ingested rows.
    std::vector<std::size_t> funnel_counts;
    std::vector<std::string> funnel_stages;
};

struct FunnelConfig {
    double min_los_hours = 48.0;
    double min_age = 18.0;
    double max_age = 80.0;
    std::vector<std::string> inclusion_icd_prefixes = {"K74", "K70"};
    std::vector<std::string> exclusion_icd_prefixes = {"C"};
};

// Canonical Table-4 feature columns expected in the input CSV.
const std::vector<std::string>& standard_feature_columns();

// Which of the standard columns are binary-flag encoded.
bool is_flag_feature(const std::string& name);

// Maps logical column names to file column names; identity by default.
using ColumnSchema = std::map<std::string, std::string>;

CohortTable load_cohort(const std::string& path, const ColumnSchema& schema = {});

// Long-format sidecar: stay_id,hours,value. Merges into matching records.
void load_creatinine_sidecar(CohortTable& table, const std::string& path);

CohortTable apply_funnel(const CohortTable& table, const FunnelConfig& rules);

// 1 iff some measurement pair within the window rises by at least delta.
int kdigo_label(const StayRecord& record, double window_hours = 48.0,
                double delta_mg_dl = 0.3);

struct LabelConfig {
    bool prefer_explicit_column = true;
    double window_hours = 48.0;
    double delta_mg_dl = 0.3;
};

// Feature matrix + labels from a filtered cohort.
Dataset cohort_to_dataset(const CohortTable& table, const LabelConfig& lc = {});

} // namespace aki
