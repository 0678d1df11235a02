#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace netboot {

enum class MissingPolicy { reject, drop_rows };

// Categorical per-sample label. Levels are stored in order of first appearance,
// which fixes the iteration order used by the resampling strategies.
struct Labels {
    std::vector<std::size_t> code;    // per sample, index into levels
    std::vector<std::string> levels;

    std::size_t num_levels() const { return levels.size(); }
    // Sample indices grouped by level, ascending within each level.
    std::vector<std::vector<std::size_t>> members() const;
    static Labels from_strings(const std::vector<std::string>& raw);
};

struct Dataset {
    Eigen::MatrixXd values;  // n_samples x p_vars
    std::vector<std::string> var_names;
    std::vector<std::string> sample_ids;
    std::optional<Labels> stratum;
    std::optional<Labels> cluster;

    std::size_t n_samples() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t n_vars() const { return static_cast<std::size_t>(values.cols()); }

    // Throws DataError when any Dataset invariant is broken.
    void validate() const;
};

struct LoadReport {
    std::size_t rows_dropped = 0;
    std::vector<std::string> dropped_ids;
};

struct StandardizedDataset {
    Eigen::MatrixXd values;
    Eigen::VectorXd means;
    Eigen::VectorXd sds;
    std::vector<std::string> var_names;
};

Dataset load_dataset(const std::filesystem::path& data_path,
                     const std::optional<std::filesystem::path>& meta_path,
                     MissingPolicy policy, LoadReport* report = nullptr);

// Column z-scores with the n-1 denominator. Throws DataError naming the first
// column whose sample variance is <= 1e-12.
StandardizedDataset standardize(const Dataset& d);

// TSV in the same layout load_dataset reads, 17 significant digits per cell.
void write_dataset_tsv(const Dataset& d, const std::filesystem::path& path);

}  // namespace netboot
