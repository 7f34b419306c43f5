#pragma once

#include <string>
#include <vector>

#include "ordifun/basis.hpp"
#include "ordifun/classify.hpp"
#include "ordifun/ordinal.hpp"
#include "ordifun/reducers.hpp"
#include "ordifun/simulate.hpp"
#include "ordifun/tuning.hpp"

namespace ordifun {

/// Dataset plus the unit identifiers used in its files.
struct NamedDataset {
    FunctionalDataset data;
    OrdinalLabels labels;
    std::vector<std::string> unit_ids;
};

/// File locations of a dataset bundle. The directory convention is
/// coefficients.csv + labels.csv + basis.json (+ curves.csv for raw input).
struct BundlePaths {
    std::string coefficients;
    std::string labels;
    std::string basis;
    std::string curves;  ///< optional; empty = use the coefficients file

    static BundlePaths in_dir(const std::string& dir);
};

struct LoadOptions {
    bool from_curves = false;  ///< smooth curves.csv instead of reading coefficients
    double lambda = 0.0;       ///< smoothing penalty for raw curves
    bool gcv = false;          ///< select the smoothing penalty by GCV
    int max_level = -1;        ///< expected top level; -1 infers it from the file
};

/// Load a bundle; unit order follows the labels file. Validation failures
/// carry distinct codes (missing_file, bad_header, column_mismatch,
/// missing_unit, extra_unit, duplicate_unit, bad_level, label_range,
/// bad_number).
NamedDataset load_dataset(const BundlePaths& paths, const LoadOptions& options = {});

/// Write coefficients.csv, labels.csv and basis.json into dir (created if
/// missing). Default unit ids are row indices.
void save_dataset(const std::string& dir, const FunctionalDataset& data,
                  const OrdinalLabels& labels,
                  const std::vector<std::string>* unit_ids = nullptr);

std::string basis_to_json(const BasisSpec& spec);
BasisSpec basis_from_json(const std::string& text);

/// Sidecar with the full realized draw of a simulated dataset.
void save_simulation_sidecar(const std::string& path, const ScenarioConfig& config,
                             const RealizedScenario& realized);

void save_model(const std::string& path, const FittedReducer& model);
FittedReducer load_model(const std::string& path);

void write_scores_csv(const std::string& path, const std::vector<std::string>& unit_ids,
                      const Eigen::MatrixXd& scores);

std::string report_to_json(const EvaluationReport& report);

std::string tuning_to_json(const TuningResult& result);
void write_tuning_csv(const TuningResult& result, const std::string& path);

}  // namespace ordifun
