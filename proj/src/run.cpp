// Copyright 2026 The dggfso Authors
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

#include "dgg/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "dgg/errors.hpp"

namespace dgg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  if (!obj.is_object()) throw ValidationError(std::string("invalid config: ") + where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ValidationError("invalid config: unknown key '" + key + "' in " + where);
    }
  }
}

GGParams parse_factor(const json& j, const char* where) {
  check_keys(j, {"m", "gamma", "omega"}, where);
  GGParams g;
  g.m = j.at("m").get<double>();
  g.gamma = j.at("gamma").get<double>();
  g.omega = j.contains("omega") ? j.at("omega").get<double>() : omega_from_shape(g.m, g.gamma);
  return g;
}

DoubleGGChannel parse_channel(const json& j, const RationalizeOptions& ropts) {
  if (j.is_string()) return preset(j.get<std::string>());
  check_keys(j, {"name", "large", "small", "p", "q"}, "channel");
  const GGParams large = parse_factor(j.at("large"), "channel.large");
  const GGParams small = parse_factor(j.at("small"), "channel.small");
  DoubleGGChannel ch;
  if (j.contains("p") != j.contains("q")) {
    throw ValidationError("invalid config: give both p and q or neither");
  }
  if (j.contains("p")) {
    ch = make_channel(large, small, j.at("p").get<std::int64_t>(), j.at("q").get<std::int64_t>());
  } else {
    ch = make_channel(large, small, ropts);
  }
  ch.name = j.value("name", std::string("custom"));
  return ch;
}

RationalizePolicy parse_ratio_policy(const std::string& s) {
  if (s == "simplest") return RationalizePolicy::kSimplest;
  if (s == "best") return RationalizePolicy::kBest;
  throw ValidationError("invalid config: ratio_policy must be 'simplest' or 'best'");
}

ProductModelOptions::Policy parse_product_policy(const std::string& s) {
  if (s == "minimal_order") return ProductModelOptions::Policy::kMinimalOrder;
  if (s == "most_accurate") return ProductModelOptions::Policy::kMostAccurate;
  throw ValidationError("invalid config: policy must be 'minimal_order' or 'most_accurate'");
}

std::vector<DoubleGGChannel> branches(const RunSpec& spec, int n) {
  if (spec.channels.size() > 1) return spec.channels;
  return std::vector<DoubleGGChannel>(static_cast<std::size_t>(n), spec.channels.front());
}

json factor_json(const GGParams& g) { return {{"m", g.m}, {"gamma", g.gamma}, {"omega", g.omega}}; }

json channel_json(const DoubleGGChannel& ch) {
  return {{"name", ch.name},
          {"large_scale", factor_json(ch.large_scale)},
          {"small_scale", factor_json(ch.small_scale)},
          {"p", ch.ratio.num},
          {"q", ch.ratio.den},
          {"ratio_rel_error", ch.ratio.rel_error}};
}

json model_json(const ProductModel& pm) {
  json errors = json::array();
  for (const RationalExponent& r : pm.rationalized) {
    errors.push_back({{"gamma", r.target}, {"num", r.num}, {"den", r.den}, {"rel_error", r.rel_error}});
  }
  return {{"alpha", pm.alpha},       {"beta", pm.beta},        {"k", pm.k},
          {"log_xi", pm.log_xi},     {"log_omega", pm.log_omega},
          {"max_rel_error", pm.max_rel_error()}, {"rationalization", errors}};
}

struct Prepared {
  int n = 1;
  std::vector<DoubleGGChannel> channels;
  std::optional<ProductModel> model;
  std::optional<BoundTerms> bound;
  std::optional<AsymptoticTerms> asymptotic;
};

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("unreachable output path: cannot write " + path.string());
  out << body;
  if (!out) throw ValidationError("unreachable output path: write failed for " + path.string());
}

struct CsvCurve {
  std::string label;
  std::string estimator;
  std::vector<std::pair<double, double>> points;
};

CsvCurve read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  CsvCurve c;
  c.label = path.stem().string();
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string snr, ber, lo, hi, est;
    std::getline(row, snr, ',');
    std::getline(row, ber, ',');
    std::getline(row, lo, ',');
    std::getline(row, hi, ',');
    std::getline(row, est, ',');
    c.estimator = est;
    c.points.emplace_back(std::stod(snr), std::stod(ber));
  }
  return c;
}

double nice_step(double span) {
  const double raw = span / 10.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    if (f * mag >= raw) return f * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::vector<double> SnrRange::points() const {
  std::vector<double> out;
  const double slack = step * 1e-3;
  for (long i = 0;; ++i) {
    const double v = start + static_cast<double>(i) * step;
    if (v > stop + slack) break;
    out.push_back(v);
  }
  return out;
}

void RunSpec::validate() const {
  if (estimators.empty()) throw ValidationError("invalid run spec: estimators must be nonempty");
  std::set<Estimator> seen(estimators.begin(), estimators.end());
  if (seen.size() != estimators.size()) throw ValidationError("invalid run spec: duplicate estimator");
  if (channels.empty()) throw ValidationError("invalid run spec: at least one channel is required");
  for (const DoubleGGChannel& ch : channels) dgg::validate(ch);
  if (n_values.empty()) throw ValidationError("invalid run spec: at least one N is required");
  for (int n : n_values) {
    if (n < 1) throw ValidationError("invalid run spec: N must be >= 1");
    if (channels.size() > 1 && static_cast<std::size_t>(n) != channels.size()) {
      throw ValidationError("invalid run spec: N must equal the number of listed channels");
    }
  }
  if (!(snr_db.step > 0.0) || !std::isfinite(snr_db.start) || !std::isfinite(snr_db.stop) ||
      snr_db.stop < snr_db.start) {
    throw ValidationError("invalid run spec: SNR range needs step > 0 and stop >= start");
  }
  if (snr_db.points().size() > 100000) throw ValidationError("invalid run spec: too many SNR points");
  mc.validate();
  if (prefix.empty() || prefix.find('/') != std::string::npos) {
    throw ValidationError("invalid run spec: prefix must be a plain file name");
  }
}

RunSpec parse_run_spec(const json& config) {
  RunSpec spec;
  try {
    check_keys(config, {"channels", "n", "snr_db", "estimators", "mc", "rationalization",
                        "perturb_ties", "output"},
               "config");
    if (config.contains("rationalization")) {
      const json& r = config.at("rationalization");
      check_keys(r, {"max_den", "rel_tol", "ratio_policy", "beta_cap", "max_alpha", "policy"},
                 "rationalization");
      spec.channel_rationalization.max_den = r.value("max_den", spec.channel_rationalization.max_den);
      spec.channel_rationalization.rel_tol = r.value("rel_tol", spec.channel_rationalization.rel_tol);
      spec.product.rel_tol = spec.channel_rationalization.rel_tol;
      if (r.contains("ratio_policy")) {
        spec.channel_rationalization.policy = parse_ratio_policy(r.at("ratio_policy").get<std::string>());
      }
      spec.product.beta_cap = r.value("beta_cap", spec.product.beta_cap);
      spec.product.max_alpha = r.value("max_alpha", spec.product.max_alpha);
      if (r.contains("policy")) spec.product.policy = parse_product_policy(r.at("policy").get<std::string>());
    }
    if (config.contains("channels")) {
      for (const json& c : config.at("channels")) {
        spec.channels.push_back(parse_channel(c, spec.channel_rationalization));
      }
    }
    if (config.contains("n")) {
      const json& n = config.at("n");
      if (n.is_array()) {
        spec.n_values = n.get<std::vector<int>>();
      } else {
        spec.n_values = {n.get<int>()};
      }
    } else {
      spec.n_values = {std::max(1, static_cast<int>(spec.channels.size()))};
    }
    if (config.contains("snr_db")) {
      const json& s = config.at("snr_db");
      check_keys(s, {"start", "stop", "step"}, "snr_db");
      spec.snr_db.start = s.value("start", spec.snr_db.start);
      spec.snr_db.stop = s.value("stop", spec.snr_db.stop);
      spec.snr_db.step = s.value("step", spec.snr_db.step);
    }
    if (config.contains("estimators")) {
      for (const json& e : config.at("estimators")) {
        spec.estimators.push_back(parse_estimator(e.get<std::string>()));
      }
    } else {
      spec.estimators = {Estimator::kMC, Estimator::kBound};
    }
    if (config.contains("mc")) {
      const json& m = config.at("mc");
      check_keys(m, {"seed", "n_samples", "batch_size", "confidence"}, "mc");
      spec.mc.seed = m.value("seed", spec.mc.seed);
      spec.mc.n_samples = m.value("n_samples", spec.mc.n_samples);
      spec.mc.batch_size = m.value("batch_size", spec.mc.batch_size);
      spec.mc.confidence = m.value("confidence", spec.mc.confidence);
    }
    spec.perturb_ties = config.value("perturb_ties", false);
    spec.output_dir = default_output_dir();
    if (config.contains("output")) {
      const json& o = config.at("output");
      check_keys(o, {"dir", "prefix", "plot"}, "output");
      if (o.contains("dir")) spec.output_dir = o.at("dir").get<std::string>();
      spec.prefix = o.value("prefix", spec.prefix);
      spec.plot = o.value("plot", spec.plot);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid config: ") + e.what());
  }
  return spec;
}

std::string format_csv(std::span<const BERPoint> curve) {
  std::string out = "snr_db,ber,ci_low,ci_high,estimator,n_samples\n";
  for (const BERPoint& p : curve) {
    if (!(p.ber > 0.0 && p.ber <= 0.5)) continue;
    out += fmt("%.4f", p.snr_db) + ',' + fmt("%.9e", p.ber) + ',' + fmt("%.9e", p.ci_low) + ',' +
           fmt("%.9e", p.ci_high) + ',' + std::string(to_string(p.estimator)) + ',' +
           std::to_string(p.n_samples) + '\n';
  }
  return out;
}

RunResult run(const RunSpec& spec) {
  spec.validate();
  const auto has = [&](Estimator e) {
    return std::find(spec.estimators.begin(), spec.estimators.end(), e) != spec.estimators.end();
  };

  // Everything that can fail on validation happens before any sampling.
  std::vector<Prepared> work;
  for (int n : spec.n_values) {
    Prepared p;
    p.n = n;
    p.channels = branches(spec, n);
    if (has(Estimator::kBound) || has(Estimator::kAsymptotic)) {
      p.model = build_product_model(p.channels, spec.product);
      if (has(Estimator::kBound)) p.bound = bound_terms(*p.model, n);
      if (has(Estimator::kAsymptotic)) {
        p.asymptotic = asymptotic_terms(*p.model, n, AsymptoticOptions{spec.perturb_ties});
      }
    }
    work.push_back(std::move(p));
  }

  std::error_code ec;
  fs::create_directories(spec.output_dir, ec);
  if (ec || !fs::is_directory(spec.output_dir)) {
    throw ValidationError("unreachable output path: " + spec.output_dir.string());
  }

  const std::vector<double> points = spec.snr_db.points();
  RunResult result;
  json meta;
  meta["tool"] = "dggfso";
  meta["version"] = DGGFSO_VERSION;
  meta["seed"] = spec.mc.seed;
  meta["mc"] = {{"n_samples", spec.mc.n_samples},
                {"batch_size", spec.mc.batch_size},
                {"confidence", spec.mc.confidence}};
  meta["snr_db"] = {{"start", spec.snr_db.start}, {"stop", spec.snr_db.stop}, {"step", spec.snr_db.step}};
  meta["runs"] = json::array();

  for (const Prepared& p : work) {
    json entry;
    entry["n"] = p.n;
    entry["channels"] = json::array();
    for (const DoubleGGChannel& ch : p.channels) entry["channels"].push_back(channel_json(ch));
    entry["diversity_order"] = diversity_order(p.channels, p.n);
    if (p.model) entry["product_model"] = model_json(*p.model);
    if (p.bound) entry["bound_terms"] = {{"s", p.bound->s}, {"q", p.bound->q}, {"mu", p.bound->mu}};
    if (p.asymptotic) {
      entry["asymptotic"] = {{"c_k", p.asymptotic->c_k},
                             {"diversity_order", p.asymptotic->diversity_order},
                             {"perturbed", p.asymptotic->perturbed}};
    }
    entry["files"] = json::array();

    for (Estimator e : spec.estimators) {
      std::vector<BERPoint> curve;
      switch (e) {
        case Estimator::kMC: {
          curve = mc_ber_curve(p.channels, points, spec.mc);
          json low = json::array();
          for (const BERPoint& b : curve) {
            if (b.low_precision) low.push_back(b.snr_db);
          }
          entry["mc_low_precision_snr_db"] = low;
          break;
        }
        case Estimator::kBound:
          for (double db : points) {
            const double v = ber_upper_bound(*p.bound, SNRConfig::from_db(db));
            curve.push_back({db, v, v, v, 0.0, e, 0, false});
          }
          break;
        case Estimator::kAsymptotic:
          for (double db : points) {
            const double v = asymptotic_ber(*p.asymptotic, SNRConfig::from_db(db));
            curve.push_back({db, v, v, v, 0.0, e, 0, false});
          }
          break;
      }
      const fs::path file =
          spec.output_dir / (spec.prefix + "_N" + std::to_string(p.n) + "_" + std::string(to_string(e)) + ".csv");
      write_file(file, format_csv(curve));
      result.csv_files.push_back(file);
      entry["files"].push_back(file.filename().string());
    }
    meta["runs"].push_back(entry);
  }

  result.metadata_file = spec.output_dir / (spec.prefix + "_metadata.json");
  write_file(result.metadata_file, meta.dump(2) + "\n");
  if (spec.plot) {
    result.plot_file = spec.output_dir / (spec.prefix + ".svg");
    write_file(result.plot_file, render_svg(result.csv_files, spec.prefix));
  }
  return result;
}

std::string render_svg(std::span<const fs::path> csv_files, const std::string& title) {
  std::vector<CsvCurve> curves;
  for (const fs::path& f : csv_files) curves.push_back(read_csv(f));

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = 0.0;
  for (const CsvCurve& c : curves) {
    for (const auto& [x, y] : c.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, std::floor(std::log10(y)));
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0.0;
    x_hi = 1.0;
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  y_lo = std::max(y_lo, -30.0);
  if (y_lo >= 0.0) y_lo = -1.0;

  const double w = 800, h = 560, left = 70, right = 220, top = 40, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double ly) { return top + (0.0 - ly) / (0.0 - y_lo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << title << "</text>\n";
  for (int d = 0; d >= static_cast<int>(y_lo); --d) {
    os << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << sy(d) << "\" y2=\""
       << sy(d) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << sy(d) + 4 << "\" text-anchor=\"end\">1e"
       << d << "</text>\n";
  }
  const double step = nice_step(x_hi - x_lo);
  for (double x = std::ceil(x_lo / step) * step; x <= x_hi + 1e-9; x += step) {
    os << "<line x1=\"" << sx(x) << "\" x2=\"" << sx(x) << "\" y1=\"" << top << "\" y2=\""
       << top + ph << "\" stroke=\"#eee\"/>\n";
    os << "<text x=\"" << sx(x) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
       << x << "</text>\n";
  }
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 10
     << "\" text-anchor=\"middle\">average SNR (dB)</text>\n";
  os << "<text transform=\"translate(18," << top + ph / 2
     << ") rotate(-90)\" text-anchor=\"middle\">BER</text>\n";

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::map<std::string, int> colour_of;
  int legend_row = 0;
  for (const CsvCurve& c : curves) {
    // Curves of the same N share a colour; the estimator sets the stroke.
    const std::string group = c.label.substr(0, c.label.rfind('_'));
    const int colour = colour_of.emplace(group, static_cast<int>(colour_of.size())).first->second;
    const char* stroke = palette[colour % 6];
    std::string dash = c.estimator == "asymptotic" ? " stroke-dasharray=\"6,4\"" : "";
    os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\"" << dash
       << " points=\"";
    for (const auto& [x, y] : c.points) {
      const double ly = std::log10(y);
      if (ly < y_lo) continue;
      os << sx(x) << ',' << sy(ly) << ' ';
    }
    os << "\"/>\n";
    if (c.estimator == "mc") {
      for (const auto& [x, y] : c.points) {
        const double ly = std::log10(y);
        if (ly < y_lo) continue;
        os << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(ly) << "\" r=\"3\" fill=\"none\" stroke=\""
           << stroke << "\"/>\n";
      }
    }
    const double ly = top + 10 + 18 * legend_row++;
    os << "<line x1=\"" << left + pw + 15 << "\" x2=\"" << left + pw + 45 << "\" y1=\"" << ly
       << "\" y2=\"" << ly << "\" stroke=\"" << stroke << "\" stroke-width=\"1.5\"" << dash << "/>\n";
    os << "<text x=\"" << left + pw + 52 << "\" y=\"" << ly + 4 << "\">" << c.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string format_presets() {
  std::ostringstream os;
  os << "name  gamma1  gamma2  m1    m2    omega1  omega2  p   q   description\n";
  for (const Preset& p : presets()) {
    const DoubleGGChannel& c = p.channel;
    char line[256];
    std::snprintf(line, sizeof line, "%-5s %.4f  %.4f  %-5g %-5g %.4f  %.4f  %-3lld %-3lld %s\n",
                  p.name.c_str(), c.large_scale.gamma, c.small_scale.gamma, c.large_scale.m,
                  c.small_scale.m, c.large_scale.omega, c.small_scale.omega,
                  static_cast<long long>(c.ratio.num), static_cast<long long>(c.ratio.den),
                  p.description.c_str());
    os << line;
  }
  return os.str();
}

RunSpec figure_spec(int figure) {
  RunSpec s;
  s.output_dir = default_output_dir();
  s.mc.n_samples = 10'000'000;
  s.snr_db = {0.0, 80.0, 2.0};
  switch (figure) {
    case 1:
      s.channels = {preset("b")};
      s.n_values = {1, 2, 3};
      s.estimators = {Estimator::kMC, Estimator::kBound};
      s.snr_db.stop = 120.0;
      break;
    case 2:
      s.channels = {preset("c")};
      s.n_values = {1, 2, 3};
      s.estimators = {Estimator::kMC, Estimator::kBound};
      s.snr_db.stop = 100.0;
      break;
    case 3:
      s.channels = {preset("a"), preset("b")};
      s.n_values = {2};
      s.estimators = {Estimator::kMC, Estimator::kBound, Estimator::kAsymptotic};
      break;
    case 4:
      s.channels = {preset("c"), preset("d")};
      s.n_values = {2};
      s.estimators = {Estimator::kMC, Estimator::kBound, Estimator::kAsymptotic};
      // beta = 244 for this pair at the default tolerance.
      s.product.beta_cap = 300;
      break;
    default:
      throw ValidationError("unknown figure " + std::to_string(figure) + "; valid figures: 1, 2, 3, 4");
  }
  s.prefix = "figure" + std::to_string(figure);
  return s;
}

fs::path default_output_dir() {
  if (const char* env = std::getenv("DGGFSO_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "dggfso_out";
}

}  // namespace dgg
