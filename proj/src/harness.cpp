#include "stsdelay/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "stsdelay/baselines.hpp"

namespace stsdelay {

namespace {

constexpr double kGHz = 1e9;
constexpr double kMHz = 1e6;
constexpr double kNs = 1e-9;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

bool parse_bool(const std::string& text, bool& out) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") {
    out = true;
    return true;
  }
  if (text == "false" || text == "0" || text == "no" || text == "off") {
    out = false;
    return true;
  }
  return false;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string csv_value(const CurvePoint& p) {
  switch (p.status) {
    case PointStatus::ok:
      return fmt("%.6f", p.value / kNs);
    case PointStatus::infinite:
      return "inf";
    case PointStatus::failed:
      break;
  }
  return "nan";
}

const DelayCurve* find_curve(const std::vector<DelayCurve>& curves, Model m) {
  for (const auto& c : curves) {
    if (c.model == m) return &c;
  }
  return nullptr;
}

}  // namespace

// Config -----------------------------------------------------------------------

bool ExperimentConfig::has_model(Model m) const { return std::find(models.begin(), models.end(), m) != models.end(); }

void ExperimentConfig::validate() const {
  try {
    geometry.validate();
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda_mhz must be positive");
  if (!(ell >= 0.0) || !std::isfinite(ell)) throw ValidationError("ell_m must be non-negative");
  if (models.empty()) throw ValidationError("at least one model is required");
  if (!(sweep.step > 0.0) || !std::isfinite(sweep.step)) throw ValidationError("sweep_step_mhz must be positive");
  if (!std::isfinite(sweep.start) || !std::isfinite(sweep.stop) || sweep.stop < sweep.start) {
    throw ValidationError("sweep_stop_ghz must not be below sweep_start_ghz");
  }
  const Cutoffs cut = cutoff_frequencies(geometry);
  if (!(sweep.start > cut.nu_out)) {
    throw ValidationError("sweep_start_ghz " + fmt("%.6f", sweep.start / kGHz) +
                          " is not above the outer cutoff " + fmt("%.6f", cut.nu_out / kGHz) + " GHz");
  }
  try {
    quad.validate();
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  if (out_dir.empty()) throw ValidationError("out_dir must not be empty");
}

SweepSpec default_sweep(const GuideGeometry& g, double lambda) {
  const Cutoffs cut = cutoff_frequencies(g);
  return {cut.nu_out + 2.0 * lambda, cut.nu_in + 1.0 * kGHz, 25.0 * kMHz};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  if (name == "fig1a") {
    cfg.geometry.length = 0.15;
    cfg.lambda = 30.0 * kMHz;
  } else if (name == "fig1b") {
    cfg.geometry.length = 0.20;
    cfg.lambda = 50.0 * kMHz;
  } else {
    throw ValidationError("unknown scenario '" + name + "' (expected fig1a or fig1b)");
  }
  cfg.sweep = default_sweep(cfg.geometry, cfg.lambda);
  cfg.out_dir = "stsdelay_out/" + name;
  return cfg;
}

std::vector<Model> parse_models(const std::string& list) {
  std::set<Model> chosen;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t == "sts") {
      chosen.insert(Model::sts);
    } else if (t == "pt") {
      chosen.insert(Model::pt);
    } else if (t == "bl") {
      chosen.insert(Model::bl);
    } else {
      throw ValidationError("unknown model '" + t + "' (expected sts, pt or bl)");
    }
  }
  if (chosen.empty()) throw ValidationError("model list is empty");
  return {chosen.begin(), chosen.end()};
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg = preset("fig1a");
  cfg.name = source;
  cfg.out_dir = "stsdelay_out";
  bool sweep_start = false;
  bool sweep_stop = false;
  bool sweep_step = false;
  std::set<std::string> seen;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = source + ":" + std::to_string(number) + ": ";
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ValidationError(where + "expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!seen.insert(key).second) throw ValidationError(where + "duplicate key '" + key + "'");
    if (value.empty()) throw ValidationError(where + "empty value for '" + key + "'");

    auto number_of = [&](double scale) {
      double v = 0.0;
      if (!parse_double(value, v)) throw ValidationError(where + "'" + key + "' is not a number: " + value);
      return v * scale;
    };
    auto flag_of = [&] {
      bool b = false;
      if (!parse_bool(value, b)) throw ValidationError(where + "'" + key + "' is not a boolean: " + value);
      return b;
    };

    if (key == "b_mm") {
      cfg.geometry.b = number_of(1e-3);
    } else if (key == "b_prime_mm") {
      cfg.geometry.b_prime = number_of(1e-3);
    } else if (key == "a_mm") {
      cfg.geometry.a = number_of(1e-3);
    } else if (key == "a_prime_mm") {
      cfg.geometry.a_prime = number_of(1e-3);
    } else if (key == "length_cm") {
      cfg.geometry.length = number_of(1e-2);
    } else if (key == "lambda_mhz") {
      cfg.lambda = number_of(kMHz);
    } else if (key == "ell_m") {
      cfg.ell = number_of(1.0);
    } else if (key == "sweep_start_ghz") {
      cfg.sweep.start = number_of(kGHz);
      sweep_start = true;
    } else if (key == "sweep_stop_ghz") {
      cfg.sweep.stop = number_of(kGHz);
      sweep_stop = true;
    } else if (key == "sweep_step_mhz") {
      cfg.sweep.step = number_of(kMHz);
      sweep_step = true;
    } else if (key == "models") {
      try {
        cfg.models = parse_models(value);
      } catch (const ValidationError& e) {
        throw ValidationError(where + e.what());
      }
    } else if (key == "baseline_averaging") {
      cfg.baseline_averaging = flag_of();
    } else if (key == "baseline_subtraction") {
      cfg.baseline_subtraction = flag_of();
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else {
      throw ValidationError(where + "unknown key '" + key + "'");
    }
  }
  SweepSpec fallback;
  try {
    fallback = default_sweep(cfg.geometry, cfg.lambda);
  } catch (const DomainError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  if (!sweep_start) cfg.sweep.start = fallback.start;
  if (!sweep_stop) cfg.sweep.stop = fallback.stop;
  if (!sweep_step) cfg.sweep.step = fallback.step;
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  return parse_config(in, path.string());
}

// Data -------------------------------------------------------------------------

DataFile parse_dataset(std::istream& in, const std::string& source) {
  DataFile out;
  std::string line;
  int row = 0;
  if (!std::getline(in, line)) throw ValidationError(source + ": missing header nu_ghz,delay_ns,run");
  ++row;
  if (trim(line) != "nu_ghz,delay_ns,run") {
    throw ValidationError(source + ":1: header must be nu_ghz,delay_ns,run");
  }
  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    ++row;
    const std::string where = source + ":" + std::to_string(row) + ": ";
    const std::string body = trim(line);
    if (body.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(body);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
    if (!body.empty() && body.back() == ',') fields.emplace_back();
    if (fields.size() != 3) throw ValidationError(where + "expected 3 fields, found " + std::to_string(fields.size()));
    double nu = 0.0;
    double delay = 0.0;
    if (!parse_double(fields[0], nu)) throw ValidationError(where + "bad frequency '" + fields[0] + "'");
    if (!parse_double(fields[1], delay)) throw ValidationError(where + "bad delay '" + fields[1] + "'");
    if (!(nu > 0.0)) throw ValidationError(where + "frequency must be positive");
    if (fields[2].empty()) throw ValidationError(where + "empty run label");
    auto [it, inserted] = index.emplace(fields[2], out.runs.size());
    if (inserted) out.runs.push_back(DataSet{fields[2], {}});
    DataSet& run = out.runs[it->second];
    const double nu_hz = nu * kGHz;
    if (!run.points.empty() && !(nu_hz > run.points.back().nu)) {
      throw ValidationError(where + "frequency " + fields[0] + " GHz does not increase within run '" + run.run +
                            "'");
    }
    run.points.push_back({nu_hz, delay * kNs});
    out.empty = false;
  }
  return out;
}

DataFile load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open data " + path.string());
  return parse_dataset(in, path.string());
}

// Residues ---------------------------------------------------------------------

ResidueReport residues(const DataSet& data, const std::vector<DelayCurve>& at_data) {
  if (at_data.empty()) throw ValidationError("residues need at least one curve");
  if (data.points.empty()) throw ValidationError("residues need at least one data point");
  for (const auto& c : at_data) {
    if (c.points.size() != data.points.size()) {
      throw ValidationError("curve for " + std::string(model_name(c.model)) +
                            " is not evaluated at the data frequencies");
    }
  }
  ResidueReport report;
  report.run = data.run;
  std::vector<double> sums(at_data.size(), 0.0);
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    bool usable = true;
    for (const auto& c : at_data) usable = usable && c.points[i].status == PointStatus::ok;
    if (!usable) {
      ++report.excluded_points;
      continue;
    }
    ++report.used_points;
    for (std::size_t m = 0; m < at_data.size(); ++m) {
      const double d = (data.points[i].delay - at_data[m].points[i].value) / kNs;
      sums[m] += d * d;
    }
  }
  double worst = 0.0;
  for (std::size_t m = 0; m < at_data.size(); ++m) {
    report.models.push_back({at_data[m].model, std::sqrt(sums[m]), 0.0});
    worst = std::max(worst, report.models.back().delta_raw);
  }
  report.degenerate = !(worst > 0.0);
  for (auto& r : report.models) {
    r.delta_normalized = report.degenerate ? std::numeric_limits<double>::quiet_NaN() : r.delta_raw / worst;
  }
  return report;
}

// Scenario ---------------------------------------------------------------------

double model_delay(const ExperimentConfig& cfg, Model model, double nu) {
  const GuideGeometry& g = cfg.geometry;
  const SourceSpec src{nu, cfg.lambda, cfg.ell};
  double value = 0.0;
  switch (model) {
    case Model::sts:
      value = optical_expected_time(src, g, cfg.quad).delay;
      break;
    case Model::pt:
      value = cfg.baseline_averaging ? averaged_phase_time(src, g, cfg.quad) : phase_time(nu, g);
      break;
    case Model::bl:
      value = cfg.baseline_averaging ? averaged_buttiker_landauer_time(src, g, cfg.quad)
                                     : buttiker_landauer_time(nu, g);
      break;
  }
  if (cfg.baseline_subtraction) value -= g.length / velocities(nu, cutoff_frequencies(g)).group;
  return value;
}

ScenarioResult run_scenario(const ExperimentConfig& cfg, const std::optional<DataFile>& data, unsigned workers) {
  cfg.validate();
  ScenarioResult result;
  result.cutoffs = cutoff_frequencies(cfg.geometry);
  auto nus = cfg.sweep.points();
  // The inner cutoff itself is always sampled so the BL divergence shows up as a point.
  const double nu_in = result.cutoffs.nu_in;
  if (nu_in > nus.front() && nu_in < nus.back()) {
    const auto at = std::lower_bound(nus.begin(), nus.end(), nu_in);
    if (std::abs(*at - nu_in) > 1e-6 * cfg.sweep.step && std::abs(*(at - 1) - nu_in) > 1e-6 * cfg.sweep.step) {
      nus.insert(at, nu_in);
    }
  }
  for (Model m : cfg.models) {
    result.curves.push_back(evaluate_curve(m, nus, [&](double nu) { return model_delay(cfg, m, nu); }, workers));
  }
  if (data) {
    result.data = data->runs;
    for (const auto& run : data->runs) {
      if (run.points.empty()) continue;
      std::vector<double> at;
      for (const auto& p : run.points) at.push_back(p.nu);
      std::vector<DelayCurve> curves;
      for (Model m : cfg.models) {
        curves.push_back(evaluate_curve(
            m, at,
            [&](double nu) {
              if (!(nu > result.cutoffs.nu_out)) throw DomainError("data point at or below the outer cutoff");
              return model_delay(cfg, m, nu);
            },
            workers));
      }
      result.reports.push_back(residues(run, curves));
    }
  }
  return result;
}

// Outputs ----------------------------------------------------------------------

std::string render_curves_csv(const ScenarioResult& result) {
  std::string out = "nu_ghz,sts_ns,pt_ns,bl_ns\n";
  if (result.curves.empty()) return out;
  const std::size_t n = result.curves.front().points.size();
  for (std::size_t i = 0; i < n; ++i) {
    out += fmt("%.6f", result.curves.front().points[i].nu / kGHz);
    for (Model m : {Model::sts, Model::pt, Model::bl}) {
      out += ',';
      if (const auto* c = find_curve(result.curves, m)) out += csv_value(c->points[i]);
    }
    out += '\n';
  }
  return out;
}

std::string render_residues_csv(const ScenarioResult& result) {
  std::string out = "model,delta_raw,delta_normalized,run\n";
  for (const auto& r : result.reports) {
    for (const auto& m : r.models) {
      out += model_name(m.model);
      out += ',' + fmt("%.9g", m.delta_raw) + ',' + (r.degenerate ? std::string("nan") : fmt("%.9g", m.delta_normalized)) +
             ',' + r.run + '\n';
    }
  }
  return out;
}

namespace {

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.2;
};

Axis nice_axis(double lo, double hi, int target) {
  if (!(hi > lo)) hi = lo + 1.0;
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (raw <= step) break;
  }
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

struct SeriesStyle {
  const char* label;
  const char* color;
  const char* dash;
};

SeriesStyle style_of(Model m) {
  switch (m) {
    case Model::sts:
      return {"STS", "#000000", ""};
    case Model::pt:
      return {"PT", "#1f4fbf", "4,3"};
    case Model::bl:
      return {"BL", "#b22222", "12,6"};
  }
  return {"?", "#888888", ""};
}

}  // namespace

std::string render_figure_svg(const ScenarioResult& result, const ExperimentConfig& cfg) {
  constexpr double W = 800, H = 500, left = 70, right = 770, top = 40, bottom = 440;
  const double x_lo_data = cfg.sweep.start / kGHz;
  const double x_hi_data = cfg.sweep.stop / kGHz;
  const Axis xa = nice_axis(x_lo_data, x_hi_data, 8);

  // Vertical range from the finite STS/PT values and the data; BL spikes are clipped.
  double y_hi = 0.0;
  std::vector<double> bl_values;
  for (const auto& c : result.curves) {
    for (const auto& p : c.points) {
      if (p.status != PointStatus::ok) continue;
      if (c.model == Model::bl) {
        bl_values.push_back(p.value / kNs);
      } else {
        y_hi = std::max(y_hi, p.value / kNs);
      }
    }
  }
  for (const auto& run : result.data) {
    for (const auto& p : run.points) y_hi = std::max(y_hi, p.delay / kNs);
  }
  if (!(y_hi > 0.0) && !bl_values.empty()) {
    std::sort(bl_values.begin(), bl_values.end());
    y_hi = 3.0 * bl_values[bl_values.size() / 2];
  }
  double y_lo = 0.0;
  for (const auto& c : result.curves) {
    for (const auto& p : c.points) {
      if (p.status == PointStatus::ok && c.model != Model::bl) y_lo = std::min(y_lo, p.value / kNs);
    }
  }
  const Axis ya = nice_axis(y_lo, y_hi > y_lo ? 1.1 * y_hi : y_lo + 1.0, 6);

  auto sx = [&](double ghz) { return left + (ghz - xa.lo) / (xa.hi - xa.lo) * (right - left); };
  auto sy = [&](double ns) { return bottom - (ns - ya.lo) / (ya.hi - ya.lo) * (bottom - top); };
  auto num = [](double v) { return fmt("%.2f", v); };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" viewBox=\"0 0 " + num(W) + " " + num(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<title>Delay time versus central frequency: " + cfg.name + "</title>\n";
  svg += "<defs><clipPath id=\"plot\"><rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" +
         num(right - left) + "\" height=\"" + num(bottom - top) + "\"/></clipPath></defs>\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(W) + "\" height=\"" + num(H) + "\" fill=\"#ffffff\"/>\n";
  svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(right - left) + "\" height=\"" +
         num(bottom - top) + "\" fill=\"none\" stroke=\"#000000\"/>\n";

  // Ticks.
  svg += "<g id=\"x-axis\">\n";
  for (double t = xa.lo; t <= xa.hi + 1e-9 * xa.step; t += xa.step) {
    const double x = sx(t);
    svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(x) + "\" y2=\"" + num(bottom + 5) +
           "\" stroke=\"#000000\"/>";
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(bottom + 18) + "\" text-anchor=\"middle\">" +
           fmt(xa.step < 0.1 ? "%.2f" : "%.1f", t) + "</text>\n";
  }
  svg += "<text x=\"" + num(0.5 * (left + right)) + "\" y=\"" + num(bottom + 38) +
         "\" text-anchor=\"middle\">central frequency (GHz)</text>\n</g>\n";
  svg += "<g id=\"y-axis\">\n";
  for (double t = ya.lo; t <= ya.hi + 1e-9 * ya.step; t += ya.step) {
    const double y = sy(t);
    svg += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left) + "\" y2=\"" + num(y) +
           "\" stroke=\"#000000\"/>";
    svg += "<text x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
           fmt(ya.step < 0.1 ? "%.2f" : "%.1f", t) + "</text>\n";
  }
  svg += "<text x=\"18\" y=\"" + num(0.5 * (top + bottom)) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num(0.5 * (top + bottom)) + ")\">delay time (ns)</text>\n</g>\n";

  // Cutoff line.
  const double nu_in = result.cutoffs.nu_in / kGHz;
  if (nu_in >= xa.lo && nu_in <= xa.hi) {
    svg += "<line id=\"cutoff\" x1=\"" + num(sx(nu_in)) + "\" y1=\"" + num(top) + "\" x2=\"" + num(sx(nu_in)) +
           "\" y2=\"" + num(bottom) + "\" stroke=\"#555555\" stroke-dasharray=\"2,3\"/>\n";
    svg += "<text x=\"" + num(sx(nu_in) + 4) + "\" y=\"" + num(top + 14) + "\" fill=\"#555555\">cutoff " +
           fmt("%.3f", nu_in) + " GHz</text>\n";
  }

  // Model curves, broken at non-finite points.
  std::size_t clipped = 0;
  std::size_t failed = 0;
  svg += "<g clip-path=\"url(#plot)\">\n";
  for (const auto& c : result.curves) {
    const auto st = style_of(c.model);
    std::string d;
    bool pen = false;
    for (const auto& p : c.points) {
      if (p.status != PointStatus::ok) {
        pen = false;
        if (p.status == PointStatus::infinite) ++clipped;
        if (p.status == PointStatus::failed) ++failed;
        continue;
      }
      d += (pen ? " L" : (d.empty() ? "M" : " M")) + num(sx(p.nu / kGHz)) + "," + num(sy(p.value / kNs));
      pen = true;
    }
    svg += "<path id=\"curve-" + std::string(model_name(c.model)) + "\" d=\"" + d + "\" fill=\"none\" stroke=\"" +
           st.color + "\" stroke-width=\"1.8\"";
    if (*st.dash) svg += std::string(" stroke-dasharray=\"") + st.dash + "\"";
    svg += "/>\n";
  }

  // Data markers: filled circles, open squares, then open triangles.
  auto marker = [&](std::size_t r, double x, double y) {
    if (r == 0) return "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"3.5\" fill=\"#000000\"/>\n";
    if (r == 1) {
      return "<rect x=\"" + num(x - 3.5) + "\" y=\"" + num(y - 3.5) +
             "\" width=\"7.00\" height=\"7.00\" fill=\"none\" stroke=\"#000000\"/>\n";
    }
    return "<path d=\"M" + num(x) + "," + num(y - 4) + " L" + num(x + 4) + "," + num(y + 3) + " L" + num(x - 4) + "," +
           num(y + 3) + " Z\" fill=\"none\" stroke=\"#000000\"/>\n";
  };
  for (std::size_t r = 0; r < result.data.size(); ++r) {
    svg += "<g id=\"data-" + std::to_string(r) + "\">\n";
    for (const auto& p : result.data[r].points) svg += marker(r, sx(p.nu / kGHz), sy(p.delay / kNs));
    svg += "</g>\n";
  }
  svg += "</g>\n";

  // Legend.
  double ly = top + 16;
  svg += "<g id=\"legend\">\n";
  for (const auto& c : result.curves) {
    const auto st = style_of(c.model);
    svg += "<line x1=\"" + num(left + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(left + 42) + "\" y2=\"" +
           num(ly) + "\" stroke=\"" + st.color + "\" stroke-width=\"1.8\"";
    if (*st.dash) svg += std::string(" stroke-dasharray=\"") + st.dash + "\"";
    svg += "/><text x=\"" + num(left + 48) + "\" y=\"" + num(ly + 4) + "\">" + st.label + "</text>\n";
    ly += 16;
  }
  for (std::size_t r = 0; r < result.data.size(); ++r) {
    svg += marker(r, left + 27, ly);
    svg += "<text x=\"" + num(left + 48) + "\" y=\"" + num(ly + 4) + "\">" + result.data[r].run + "</text>\n";
    ly += 16;
  }
  svg += "</g>\n";

  std::string note;
  if (clipped > 0) note += std::to_string(clipped) + " divergent point(s) at the cutoff clipped";
  if (failed > 0) note += std::string(note.empty() ? "" : "; ") + std::to_string(failed) + " failed point(s) omitted";
  if (!note.empty()) {
    svg += "<text id=\"annotation\" x=\"" + num(right) + "\" y=\"" + num(top - 12) +
           "\" text-anchor=\"end\" fill=\"#b22222\">" +
           note + "</text>\n";
  }
  svg += "<text x=\"" + num(left) + "\" y=\"" + num(top - 12) + "\">" + cfg.name + ": L = " +
         fmt("%.1f", cfg.geometry.length * 100.0) + " cm, linewidth " + fmt("%.1f", cfg.lambda / kMHz) +
         " MHz</text>\n";
  svg += "</svg>\n";
  return svg;
}

void emit_outputs(const ScenarioResult& result, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& body) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
    if (!out) throw std::runtime_error("write failed for " + path.string());
  };
  write("curves.csv", render_curves_csv(result));
  write("figure.svg", render_figure_svg(result, cfg));
  const auto residues_path = dir / "residues.csv";
  if (!result.reports.empty()) {
    write("residues.csv", render_residues_csv(result));
  } else if (std::filesystem::exists(residues_path)) {
    std::filesystem::remove(residues_path);
  }
}

}  // namespace stsdelay
