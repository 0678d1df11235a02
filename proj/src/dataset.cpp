#include "netboot/dataset.hpp"

#include "netboot/error.hpp"
#include "netboot/tsv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

namespace netboot {

namespace {

void require_unique(const std::vector<std::string>& names, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second) throw DataError(std::string("duplicate ") + what + " '" + n + "'");
}

bool parse_cell(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

std::vector<std::vector<std::size_t>> Labels::members() const {
    std::vector<std::vector<std::size_t>> out(levels.size());
    for (std::size_t i = 0; i < code.size(); ++i) out[code[i]].push_back(i);
    return out;
}

Labels Labels::from_strings(const std::vector<std::string>& raw) {
    Labels l;
    std::unordered_map<std::string, std::size_t> index;
    l.code.reserve(raw.size());
    for (const auto& s : raw) {
        auto [it, inserted] = index.emplace(s, l.levels.size());
        if (inserted) l.levels.push_back(s);
        l.code.push_back(it->second);
    }
    return l;
}

void Dataset::validate() const {
    if (n_samples() < 3) throw DataError("dataset needs at least 3 samples, found " + std::to_string(n_samples()));
    if (n_vars() < 2) throw DataError("dataset needs at least 2 variables, found " + std::to_string(n_vars()));
    if (var_names.size() != n_vars()) throw DataError("variable name count does not match columns");
    if (sample_ids.size() != n_samples()) throw DataError("sample id count does not match rows");
    require_unique(var_names, "variable name");
    require_unique(sample_ids, "sample id");
    if (!values.allFinite()) throw DataError("dataset contains non-finite values");
    for (const auto* l : {&stratum, &cluster}) {
        if (l->has_value() && (*l)->code.size() != n_samples())
            throw DataError("label vector length does not match sample count");
    }
}

Dataset load_dataset(const std::filesystem::path& data_path,
                     const std::optional<std::filesystem::path>& meta_path,
                     MissingPolicy policy, LoadReport* report) {
    const auto table = tsv::read(data_path);
    if (table.header.size() < 2) throw DataError(data_path.string() + ": no variable columns");

    std::vector<std::string> var_names(table.header.begin() + 1, table.header.end());
    require_unique(var_names, "variable name");
    const std::size_t p = var_names.size();
    const std::size_t n_raw = table.rows.size();

    Eigen::MatrixXd raw(static_cast<Eigen::Index>(n_raw), static_cast<Eigen::Index>(p));
    std::vector<std::string> ids;
    std::vector<bool> has_na(n_raw, false);
    ids.reserve(n_raw);
    for (std::size_t r = 0; r < n_raw; ++r) {
        const auto& row = table.rows[r];
        ids.push_back(row[0]);
        for (std::size_t c = 0; c < p; ++c) {
            const auto& cell = row[c + 1];
            double v = 0.0;
            if (cell == "NA") {
                if (policy == MissingPolicy::reject) {
                    throw DataError("missing value (NA) at sample '" + row[0] + "', variable '" +
                                    var_names[c] + "' under reject policy");
                }
                has_na[r] = true;
                v = 0.0;
            } else if (!parse_cell(cell, v)) {
                throw DataError("unparseable cell '" + cell + "' at row " + std::to_string(r + 2) +
                                " (sample '" + row[0] + "'), column " + std::to_string(c + 2) +
                                " (variable '" + var_names[c] + "')");
            }
            raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    require_unique(ids, "sample id");

    // Metadata is joined against the full sample set before any row is dropped.
    std::vector<std::string> stratum_raw, cluster_raw;
    bool have_stratum = false, have_cluster = false;
    if (meta_path) {
        const auto meta = tsv::read(*meta_path);
        const int id_col = meta.column("sample_id");
        if (id_col < 0) throw DataError(meta_path->string() + ": missing 'sample_id' column");
        const int s_col = meta.column("stratum");
        const int c_col = meta.column("cluster");
        have_stratum = s_col >= 0;
        have_cluster = c_col >= 0;

        std::unordered_map<std::string, std::size_t> meta_row;
        for (std::size_t i = 0; i < meta.rows.size(); ++i) {
            const auto& id = meta.rows[i][static_cast<std::size_t>(id_col)];
            if (!meta_row.emplace(id, i).second) throw DataError("duplicate sample_id '" + id + "' in metadata");
        }
        std::unordered_set<std::string> data_ids(ids.begin(), ids.end());
        for (const auto& row : meta.rows) {
            const auto& id = row[static_cast<std::size_t>(id_col)];
            if (!data_ids.count(id)) throw DataError("metadata sample_id '" + id + "' not present in data");
        }
        for (const auto& id : ids) {
            auto it = meta_row.find(id);
            if (it == meta_row.end()) throw DataError("data sample '" + id + "' has no metadata row");
            const auto& row = meta.rows[it->second];
            auto label = [&](int col, const char* what) {
                const auto& v = row[static_cast<std::size_t>(col)];
                if (v.empty() || v == "NA") throw DataError(std::string("sample '") + id + "' has no " + what + " label");
                return v;
            };
            if (have_stratum) stratum_raw.push_back(label(s_col, "stratum"));
            if (have_cluster) cluster_raw.push_back(label(c_col, "cluster"));
        }
    }

    std::vector<std::size_t> keep;
    LoadReport local;
    for (std::size_t r = 0; r < n_raw; ++r) {
        if (has_na[r]) {
            ++local.rows_dropped;
            local.dropped_ids.push_back(ids[r]);
        } else {
            keep.push_back(r);
        }
    }

    Dataset d;
    d.var_names = std::move(var_names);
    d.values.resize(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(p));
    std::vector<std::string> s_kept, c_kept;
    for (std::size_t k = 0; k < keep.size(); ++k) {
        d.values.row(static_cast<Eigen::Index>(k)) = raw.row(static_cast<Eigen::Index>(keep[k]));
        d.sample_ids.push_back(ids[keep[k]]);
        if (have_stratum) s_kept.push_back(stratum_raw[keep[k]]);
        if (have_cluster) c_kept.push_back(cluster_raw[keep[k]]);
    }
    if (have_stratum) d.stratum = Labels::from_strings(s_kept);
    if (have_cluster) d.cluster = Labels::from_strings(c_kept);
    d.validate();
    if (report) *report = std::move(local);
    return d;
}

StandardizedDataset standardize(const Dataset& d) {
    const auto n = d.values.rows();
    if (n < 2) throw DataError("cannot standardize fewer than 2 samples");
    StandardizedDataset out;
    out.var_names = d.var_names;
    out.means = d.values.colwise().mean().transpose();
    out.sds.resize(d.values.cols());
    out.values.resize(n, d.values.cols());
    for (Eigen::Index j = 0; j < d.values.cols(); ++j) {
        const Eigen::VectorXd centered = d.values.col(j).array() - out.means(j);
        const double var = centered.squaredNorm() / static_cast<double>(n - 1);
        if (!(var > 1e-12)) {
            throw DataError("zero-variance column '" +
                            (static_cast<std::size_t>(j) < d.var_names.size() ? d.var_names[static_cast<std::size_t>(j)]
                                                                              : std::to_string(j)) +
                            "'");
        }
        out.sds(j) = std::sqrt(var);
        out.values.col(j) = centered / out.sds(j);
    }
    return out;
}

void write_dataset_tsv(const Dataset& d, const std::filesystem::path& path) {
    std::string s = "sample_id";
    for (const auto& v : d.var_names) s += "\t" + v;
    s += "\n";
    char buf[64];
    for (std::size_t r = 0; r < d.n_samples(); ++r) {
        s += d.sample_ids[r];
        for (std::size_t c = 0; c < d.n_vars(); ++c) {
            std::snprintf(buf, sizeof(buf), "\t%.17g",
                          d.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
            s += buf;
        }
        s += "\n";
    }
    tsv::write_atomic(path, s);
}

}  // namespace netboot
