#include "aki/cohort.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "aki/csv.hpp"
#include "aki/errors.hpp"

namespace aki {

const std::vector<std::string>& standard_feature_columns() {
    static const std::vector<std::string> cols = {
        "alt",        "hematocrit", "hemoglobin",      "wbc",
        "anion_gap",  "admission_weight", "albumin",   "ptt",
        "po2",        "ph",         "bilirubin_total", "calcium_total",
        "iodine",     "age",        "cci",             "gauge20_outside"};
    return cols;
}

bool is_flag_feature(const std::string& name) { return name == "gauge20_outside"; }

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string strip_dots(const std::string& s) {
    std::string out;
    for (char c : s)
        if (c != '.') out += c;
    return out;
}

bool icd_prefix_match(const std::string& code, const std::string& prefix) {
    const std::string c = lower(strip_dots(code));
    const std::string p = lower(strip_dots(prefix));
    return c.size() >= p.size() && c.compare(0, p.size(), p) == 0;
}

std::optional<double> parse_cell(const std::string& s, std::size_t row, const std::string& col) {
    std::string trimmed = s;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    trimmed.erase(trimmed.find_last_not_of(" \t") + 1);
    if (trimmed.empty()) return std::nullopt;
    double v;
    const char* begin = trimmed.data();
    const char* end = begin + trimmed.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw DataError("unparseable cell at row " + std::to_string(row) + ", column '" + col + "': '" + s + "'");
    return v;
}

std::string mapped(const ColumnSchema& schema, const std::string& logical) {
    auto it = schema.find(logical);
    return it == schema.end() ? logical : it->second;
}

} // namespace

CohortTable load_cohort(const std::string& path, const ColumnSchema& schema) {
    csv::Table t = csv::read_file(path);

    const std::vector<std::string> required = {"stay_id", "subject_id", "age",
                                               "icu_los_hours", "admission_seq", "icd_codes"};
    std::map<std::string, int> col;
    for (const auto& name : required) {
        int j = t.column(mapped(schema, name));
        if (j < 0) throw DataError("schema error: missing required column '" + mapped(schema, name) + "'");
        col[name] = j;
    }
    const int label_col = t.column(mapped(schema, "label"));

    std::map<std::string, int> feat_col;
    for (const auto& name : standard_feature_columns()) {
        int j = t.column(mapped(schema, name));
        if (j >= 0) feat_col[name] = j;
    }

    // Repeated cr_t/cr_v pairs, matched in header order.
    std::vector<int> cr_t_cols, cr_v_cols;
    const std::string cr_t_name = mapped(schema, "cr_t");
    const std::string cr_v_name = mapped(schema, "cr_v");
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        if (t.header[j] == cr_t_name) cr_t_cols.push_back(static_cast<int>(j));
        if (t.header[j] == cr_v_name) cr_v_cols.push_back(static_cast<int>(j));
    }
    if (cr_t_cols.size() != cr_v_cols.size())
        throw DataError("schema error: unpaired cr_t/cr_v columns");

    CohortTable table;
    table.records.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != t.header.size())
            throw DataError("row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                            " cells, expected " + std::to_string(t.header.size()));
        StayRecord rec;
        rec.stay_id = row[col["stay_id"]];
        rec.subject_id = row[col["subject_id"]];
        auto need = [&](const std::string& name) {
            auto v = parse_cell(row[col[name]], r, name);
            if (!v) throw DataError("empty required cell at row " + std::to_string(r) + ", column '" + name + "'");
            return *v;
        };
        rec.age_years = need("age");
        rec.icu_los_hours = need("icu_los_hours");
        rec.admission_seq = static_cast<int>(need("admission_seq"));

        for (const auto& piece : csv::split_line(row[col["icd_codes"]], ';'))
            if (!piece.empty()) rec.icd_codes.push_back(piece);

        for (const auto& [name, j] : feat_col)
            rec.raw_features[name] = parse_cell(row[j], r, name);
        // `age` doubles as a model feature
        if (!feat_col.count("age")) rec.raw_features["age"] = rec.age_years;

        for (std::size_t p = 0; p < cr_t_cols.size(); ++p) {
            auto ct = parse_cell(row[cr_t_cols[p]], r, "cr_t");
            auto cv = parse_cell(row[cr_v_cols[p]], r, "cr_v");
            if (ct && cv) rec.creatinine_series.push_back({*ct, *cv});
        }
        std::sort(rec.creatinine_series.begin(), rec.creatinine_series.end(),
                  [](const CreatininePoint& a, const CreatininePoint& b) { return a.hours < b.hours; });

        if (label_col >= 0) {
            auto v = parse_cell(row[label_col], r, "label");
            if (v) rec.explicit_label = *v >= 0.5 ? 1 : 0;
        }
        table.records.push_back(std::move(rec));
    }

    std::set<std::string> ids;
    for (const auto& rec : table.records)
        if (!ids.insert(rec.stay_id).second)
            throw DataError("duplicate stay_id: " + rec.stay_id);

    table.funnel_stages = {"ingested"};
    table.funnel_counts = {table.records.size()};
    return table;
}

void load_creatinine_sidecar(CohortTable& table, const std::string& path) {
    csv::Table t = csv::read_file(path);
    int id_col = t.column("stay_id"), h_col = t.column("hours"), v_col = t.column("value");
    if (id_col < 0 || h_col < 0 || v_col < 0)
        throw DataError("creatinine sidecar needs columns stay_id,hours,value");
    std::map<std::string, StayRecord*> by_id;
    for (auto& rec : table.records) by_id[rec.stay_id] = &rec;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        auto it = by_id.find(t.rows[r][id_col]);
        if (it == by_id.end()) continue;
        auto h = parse_cell(t.rows[r][h_col], r, "hours");
        auto v = parse_cell(t.rows[r][v_col], r, "value");
        if (h && v) it->second->creatinine_series.push_back({*h, *v});
    }
    for (auto& rec : table.records)
        std::sort(rec.creatinine_series.begin(), rec.creatinine_series.end(),
                  [](const CreatininePoint& a, const CreatininePoint& b) { return a.hours < b.hours; });
}

CohortTable apply_funnel(const CohortTable& table, const FunnelConfig& rules) {
    CohortTable out;
    out.funnel_stages = table.funnel_stages;
    out.funnel_counts = table.funnel_counts;
    out.records = table.records;

    auto stage = [&](const std::string& name, auto pred) {
        std::vector<StayRecord> kept;
        for (auto& rec : out.records)
            if (pred(rec)) kept.push_back(std::move(rec));
        out.records = std::move(kept);
        out.funnel_stages.push_back(name);
        out.funnel_counts.push_back(out.records.size());
    };

    stage("los_ge_min", [&](const StayRecord& r) { return r.icu_los_hours >= rules.min_los_hours; });
    stage("first_stay", [](const StayRecord& r) { return r.admission_seq == 1; });
    stage("age_in_bounds",
          [&](const StayRecord& r) { return r.age_years >= rules.min_age && r.age_years <= rules.max_age; });
    stage("cirrhosis_inclusion", [&](const StayRecord& r) {
        return std::any_of(r.icd_codes.begin(), r.icd_codes.end(), [&](const std::string& c) {
            return std::any_of(rules.inclusion_icd_prefixes.begin(), rules.inclusion_icd_prefixes.end(),
                               [&](const std::string& p) { return icd_prefix_match(c, p); });
        });
    });
    stage("cancer_exclusion", [&](const StayRecord& r) {
        return std::none_of(r.icd_codes.begin(), r.icd_codes.end(), [&](const std::string& c) {
            return std::any_of(rules.exclusion_icd_prefixes.begin(), rules.exclusion_icd_prefixes.end(),
                               [&](const std::string& p) { return icd_prefix_match(c, p); });
        });
    });
    return out;
}

int kdigo_label(const StayRecord& record, double window_hours, double delta_mg_dl) {
    if (record.creatinine_series.empty())
        throw DataError("stay " + record.stay_id + ": empty creatinine series, cannot derive label");
    const auto& s = record.creatinine_series;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i; j < s.size(); ++j) {
            const double dt = s[j].hours - s[i].hours;
            if (dt < 0.0 || dt > window_hours) continue;
            if (s[j].value - s[i].value >= delta_mg_dl) return 1;
        }
    }
    return 0;
}

Dataset cohort_to_dataset(const CohortTable& table, const LabelConfig& lc) {
    const auto& cols = standard_feature_columns();
    Dataset ds = Dataset::make(table.records.size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        ds.meta[j].name = cols[j];
        ds.meta[j].kind = is_flag_feature(cols[j]) ? FeatureKind::BinaryFlag : FeatureKind::Continuous;
    }
    for (std::size_t r = 0; r < table.records.size(); ++r) {
        const auto& rec = table.records[r];
        for (std::size_t j = 0; j < cols.size(); ++j) {
            auto it = rec.raw_features.find(cols[j]);
            if (it != rec.raw_features.end() && it->second.has_value()) {
                ds.at(r, j) = *it->second;
            } else {
                ds.set_missing(r, j, true);
            }
        }
        if (lc.prefer_explicit_column && rec.explicit_label.has_value()) {
            ds.labels[r] = *rec.explicit_label;
        } else {
            ds.labels[r] = kdigo_label(rec, lc.window_hours, lc.delta_mg_dl);
        }
    }
    ds.recompute_missing_fractions();
    return ds;
}

} // namespace aki
