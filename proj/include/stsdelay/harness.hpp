#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stsdelay/waveguide.hpp"

namespace stsdelay {

/// One delay experiment: geometry, source line, sweep, models and outputs.
/// Internally SI; the file formats use mm, cm, MHz, GHz and ns.
struct ExperimentConfig {
  std::string name = "custom";
  GuideGeometry geometry;
  double lambda = 30e6;
  double ell = 0.0;
  SweepSpec sweep;
  std::vector<Model> models{Model::sts, Model::pt, Model::bl};
  QuadratureSpec quad;
  /// Average PT and BL over the |A|^2 line shape instead of evaluating at nu_mu.
  bool baseline_averaging = false;
  /// Subtract the empty-guide transit L / v_group(nu_mu) from every model.
  bool baseline_subtraction = false;
  std::string out_dir = "stsdelay_out";

  /// Throws ValidationError.
  void validate() const;
  bool has_model(Model m) const;
};

/// [nu_out + 2 Lambda, nu_in + 1 GHz] in 25 MHz steps.
SweepSpec default_sweep(const GuideGeometry& g, double lambda);

/// Built-in scenarios "fig1a" (L = 15 cm, Lambda = 30 MHz) and "fig1b"
/// (L = 20 cm, Lambda = 50 MHz) on the X-band guide narrowed to 7.9 x 15.8 mm.
ExperimentConfig preset(const std::string& name);

/// Flat `key = value` file; `#` starts a comment. Missing keys take the
/// fig1a values, the sweep defaults to default_sweep(). Diagnostics carry
/// `source:line:`.
ExperimentConfig parse_config(std::istream& in, const std::string& source);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses "sts,pt,bl" (any subset, any order) into canonical order.
std::vector<Model> parse_models(const std::string& list);

struct DataPoint {
  double nu = 0.0;
  double delay = 0.0;
};

struct DataSet {
  std::string run;
  std::vector<DataPoint> points;
};

struct DataFile {
  /// One DataSet per run label, in order of first appearance.
  std::vector<DataSet> runs;
  /// Header present but no rows.
  bool empty = true;
};

/// CSV with header `nu_ghz,delay_ns,run`. Frequencies must increase strictly
/// within a run. Diagnostics carry `source:row:`.
DataFile parse_dataset(std::istream& in, const std::string& source);
DataFile load_dataset(const std::filesystem::path& path);

struct ModelResidue {
  Model model = Model::sts;
  /// sqrt(sum (y_i - f(x_i))^2), in ns.
  double delta_raw = 0.0;
  /// delta_raw / max delta_raw; NaN when the report is degenerate.
  double delta_normalized = 0.0;
};

struct ResidueReport {
  std::string run;
  std::vector<ModelResidue> models;
  std::size_t used_points = 0;
  /// Points dropped because some model failed or diverged there.
  std::size_t excluded_points = 0;
  /// Every delta is zero, so the normalization is undefined.
  bool degenerate = false;
};

/// Residues of each curve against `data`. Every curve must be evaluated at
/// exactly the data frequencies, in order.
ResidueReport residues(const DataSet& data, const std::vector<DelayCurve>& at_data);

struct ScenarioResult {
  Cutoffs cutoffs;
  std::vector<DelayCurve> curves;
  /// One report per data run.
  std::vector<ResidueReport> reports;
  /// Data, for plotting.
  std::vector<DataSet> data;
};

/// Delay of one model at nu_mu, with the config's averaging, subtraction
/// and ell applied.
double model_delay(const ExperimentConfig& cfg, Model model, double nu);

/// Evaluates every requested model over the sweep (plus nu_in when it falls
/// inside it) and, when data is given, at the exact data frequencies of each run.
ScenarioResult run_scenario(const ExperimentConfig& cfg, const std::optional<DataFile>& data = std::nullopt,
                            unsigned workers = 0);

/// Writes curves.csv, figure.svg and (when there is data) residues.csv into
/// `dir`, creating it if needed. Output bytes depend only on the inputs.
void emit_outputs(const ScenarioResult& result, const ExperimentConfig& cfg, const std::filesystem::path& dir);

/// The individual artifacts, as strings.
std::string render_curves_csv(const ScenarioResult& result);
std::string render_residues_csv(const ScenarioResult& result);
std::string render_figure_svg(const ScenarioResult& result, const ExperimentConfig& cfg);

}  // namespace stsdelay
