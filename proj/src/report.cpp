#include "kjmix/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace kjmix {

using nlohmann::json;

TimeFormat parse_time_format(const std::string& name) {
  if (name == "hhmm") return TimeFormat::hhmm;
  if (name == "hhmmss") return TimeFormat::hhmmss;
  if (name == "hours") return TimeFormat::hours;
  if (name == "radians") return TimeFormat::radians;
  throw std::invalid_argument("unknown time format: " + name);
}

std::string time_format_name(TimeFormat fmt) {
  switch (fmt) {
    case TimeFormat::hhmm: return "hhmm";
    case TimeFormat::hhmmss: return "hhmmss";
    case TimeFormat::hours: return "hours";
    case TimeFormat::radians: return "radians";
  }
  return "?";
}

namespace {

double parse_number(const std::string& text) {
  std::size_t pos = 0;
  const double v = std::stod(text, &pos);
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos != text.size()) throw std::invalid_argument("trailing characters");
  return v;
}

// "HH:MM" or "HH:MM:SS"
double parse_clock_hours(const std::string& text, bool with_seconds) {
  int hh = 0, mm = 0, ss = 0;
  char extra = 0;
  if (with_seconds) {
    if (std::sscanf(text.c_str(), "%d:%d:%d%c", &hh, &mm, &ss, &extra) != 3)
      throw std::invalid_argument("expected HH:MM:SS");
  } else {
    if (std::sscanf(text.c_str(), "%d:%d%c", &hh, &mm, &extra) != 2)
      throw std::invalid_argument("expected HH:MM");
  }
  if (mm < 0 || mm > 59 || ss < 0 || ss > 59)
    throw std::invalid_argument("minutes/seconds outside [0, 59]");
  return hh + mm / 60.0 + ss / 3600.0;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Angle parse_angle(const std::string& text, TimeFormat fmt) {
  switch (fmt) {
    case TimeFormat::radians:
      return Angle(parse_number(text));
    case TimeFormat::hours:
      return angle_from_hours(parse_number(text));
    case TimeFormat::hhmm:
      return angle_from_hours(parse_clock_hours(text, false));
    case TimeFormat::hhmmss:
      return angle_from_hours(parse_clock_hours(text, true));
  }
  throw std::invalid_argument("unknown time format");
}

std::string format_angle(Angle a, TimeFormat fmt) {
  char buf[40];
  switch (fmt) {
    case TimeFormat::radians:
      return g17(a.radians());
    case TimeFormat::hours:
      return g17(hours_from_angle(a));
    case TimeFormat::hhmm:
      return clock_hhmm(a);
    case TimeFormat::hhmmss: {
      long sec = std::lround(hours_from_angle(a) * 3600.0) % (24L * 3600);
      std::snprintf(buf, sizeof(buf), "%02ld:%02ld:%02ld", sec / 3600, (sec / 60) % 60, sec % 60);
      return buf;
    }
  }
  return "?";
}

std::vector<Angle> ingest(const std::string& path, TimeFormat fmt) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<Angle> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(b, e - b + 1);
    try {
      out.push_back(parse_angle(token, fmt));
    } catch (const std::exception& ex) {
      throw DataError(path + ":" + std::to_string(lineno) + ": bad value '" + token +
                      "': " + ex.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

json reparam_to_json(const ReparamMixture& mix) {
  json comps = json::array();
  for (const auto& c : mix.components)
    comps.push_back({{"mu", c.mu.radians()}, {"rho", c.rho}, {"lambda", c.lambda.radians()}});
  return {{"components", comps}, {"weights", mix.weights}};
}

ReparamMixture reparam_from_json(const json& j) {
  ReparamMixture mix;
  for (const auto& c : j.at("components"))
    mix.components.push_back(ReparamComponent{Angle(c.at("mu").get<double>()),
                                              c.at("rho").get<double>(),
                                              Angle(c.at("lambda").get<double>())});
  mix.weights = j.at("weights").get<std::vector<double>>();
  mix.validate();
  return mix;
}

json original_to_json(const OriginalMixture& mix) {
  json comps = json::array();
  for (const auto& c : mix.components)
    comps.push_back({{"mu", c.mu.radians()},
                     {"gamma", c.gamma},
                     {"rho", c.rho},
                     {"lambda", c.lambda.radians()}});
  return {{"components", comps}, {"weights", mix.weights}};
}

OriginalMixture original_from_json(const json& j) {
  OriginalMixture mix;
  for (const auto& c : j.at("components"))
    mix.components.push_back(KatoJonesParams{Angle(c.at("mu").get<double>()),
                                             c.at("gamma").get<double>(),
                                             c.at("rho").get<double>(),
                                             Angle(c.at("lambda").get<double>())});
  mix.weights = j.at("weights").get<std::vector<double>>();
  return mix;
}

}  // namespace

std::string report_to_json(const FitReport& r) {
  json shape = json::array();
  for (const auto& s : r.shape)
    shape.push_back({{"mu", s.mu.radians()},
                     {"gamma", s.gamma},
                     {"alpha_bar2", s.alpha_bar2},
                     {"beta_bar2", s.beta_bar2}});
  json modes = json::array();
  for (const Angle& a : r.modes)
    modes.push_back({{"radians", a.radians()}, {"clock", clock_hhmm(a)}});

  json doc{{"method", r.method},
           {"m", r.m},
           {"n", r.n},
           {"reparam", reparam_to_json(r.reparam)},
           {"original", original_to_json(r.original)},
           {"shape", shape},
           {"etm", r.etm_value},
           {"loglik", r.loglik},
           {"aic", r.aic},
           {"bic", r.bic},
           {"modes", modes},
           {"mmm", {{"iterations", r.mmm_iterations}, {"etm", r.mmm_etm}}},
           {"em", {{"iterations", r.em_iterations}, {"loglik_trace", r.em_loglik_trace}}},
           {"starts", r.starts},
           {"seed", r.seed},
           {"wall_time_ms", r.wall_time_ms},
           {"c", r.c},
           {"q", r.q}};
  return doc.dump(2);
}

FitReport report_from_json(const std::string& text) {
  const json doc = json::parse(text);
  FitReport r;
  r.method = doc.at("method").get<std::string>();
  r.m = doc.at("m").get<std::size_t>();
  r.n = doc.at("n").get<std::size_t>();
  r.reparam = reparam_from_json(doc.at("reparam"));
  r.original = original_from_json(doc.at("original"));
  for (const auto& s : doc.at("shape"))
    r.shape.push_back(ShapeParams{Angle(s.at("mu").get<double>()), s.at("gamma").get<double>(),
                                  s.at("alpha_bar2").get<double>(),
                                  s.at("beta_bar2").get<double>()});
  r.etm_value = doc.at("etm").get<double>();
  r.loglik = doc.at("loglik").get<double>();
  r.aic = doc.at("aic").get<double>();
  r.bic = doc.at("bic").get<double>();
  for (const auto& mo : doc.at("modes")) r.modes.push_back(Angle(mo.at("radians").get<double>()));
  r.mmm_iterations = doc.at("mmm").at("iterations").get<int>();
  r.mmm_etm = doc.at("mmm").at("etm").get<double>();
  r.em_iterations = doc.at("em").at("iterations").get<int>();
  r.em_loglik_trace = doc.at("em").at("loglik_trace").get<std::vector<double>>();
  r.starts = doc.at("starts").get<int>();
  r.seed = doc.at("seed").get<std::uint64_t>();
  r.wall_time_ms = doc.at("wall_time_ms").get<double>();
  r.c = doc.at("c").get<double>();
  r.q = doc.at("q").get<int>();
  return r;
}

ReparamMixture mixture_from_json(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.contains("reparam")) return reparam_from_json(doc.at("reparam"));
  return reparam_from_json(doc);
}

FitReport fit_report(const std::vector<Angle>& sample, std::size_t m, const std::string& method,
                     const EtmConfig& mmm_cfg, const EmConfig& em_cfg) {
  if (method != "mmm" && method != "mle" && method != "both")
    throw std::invalid_argument("method must be mmm, mle, or both");
  const auto t0 = std::chrono::steady_clock::now();

  const int q = mmm_cfg.q > 0 ? mmm_cfg.q : 2 * static_cast<int>(m);
  const TrigMoments emp = empirical_trig_moments(sample, q);

  FitReport r;
  r.method = method;
  r.m = m;
  r.n = sample.size();
  r.starts = mmm_cfg.starts;
  r.seed = mmm_cfg.seed;
  r.c = mmm_cfg.c;
  r.q = q;

  const MmmFit mm = fit_mmm(emp, m, mmm_cfg);
  r.mmm_etm = mm.etm_value;
  r.mmm_iterations = mm.starts[static_cast<std::size_t>(mm.best_start)].iterations;
  r.reparam = mm.estimate;

  if (method != "mmm") {
    const EmFit em = em_fit(sample, mm.estimate, em_cfg);
    r.reparam = em.estimate;
    r.em_iterations = em.outer_iterations;
    r.em_loglik_trace = em.loglik_trace;
  }

  r.etm_value = etm(r.reparam, emp, mmm_cfg.c);
  r.loglik = log_likelihood(sample, r.reparam);
  r.aic = aic(r.loglik, m);
  r.bic = bic(r.loglik, m, sample.size());
  r.original = recover_original(r.reparam);
  for (const auto& comp : r.original.components) {
    r.shape.push_back(shape_from_params(comp));
    r.modes.push_back(kj_mode(comp));
  }
  r.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void write_density_csv(std::ostream& os, const ReparamMixture& mix, int grid) {
  if (grid < 2) throw std::invalid_argument("density grid needs at least 2 points");
  const std::size_t m = mix.size();
  os << "theta_rad,clock_hhmm,density_total";
  for (std::size_t k = 1; k <= m; ++k) os << ",density_component_" << k;
  os << ",density_uniform\n";
  for (int i = 0; i < grid; ++i) {
    const Angle theta(two_pi * i / grid);
    os << g17(theta.radians()) << ',' << clock_hhmm(theta) << ','
       << g17(mixture_density_reparam(theta, mix));
    for (std::size_t k = 0; k < m; ++k)
      os << ',' << g17(mix.weights[k] * kj_density(theta, at_gamma_bar(mix.components[k])));
    os << ',' << g17(mix.uniform_weight() * inv_two_pi) << '\n';
  }
}

void write_moments_table(std::ostream& os, const TrigMoments& emp, const ReparamMixture& model) {
  os << "p,part,empirical,theoretical,squared_difference\n";
  for (int p = 1; p <= emp.q; ++p) {
    const ComplexMoment theo = mixture_trig_moment(p, model);
    const ComplexMoment e = emp.values[static_cast<std::size_t>(p - 1)];
    const double dc = e.real() - theo.real();
    const double ds = e.imag() - theo.imag();
    os << p << ",cos," << g17(e.real()) << ',' << g17(theo.real()) << ',' << g17(dc * dc) << '\n';
    os << p << ",sin," << g17(e.imag()) << ',' << g17(theo.imag()) << ',' << g17(ds * ds) << '\n';
  }
}

void write_histogram_csv(std::ostream& os, const std::vector<Angle>& sample, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least 1 bin");
  std::vector<std::size_t> count(static_cast<std::size_t>(bins), 0);
  for (const Angle& a : sample) {
    auto b = static_cast<std::size_t>(a.radians() / two_pi * bins);
    if (b >= count.size()) b = count.size() - 1;
    ++count[b];
  }
  const double width = two_pi / bins;
  os << "theta_lo_rad,theta_hi_rad,clock_lo,count,frequency_density\n";
  for (int b = 0; b < bins; ++b) {
    const double lo = b * width;
    const double freq =
        sample.empty() ? 0.0 : count[static_cast<std::size_t>(b)] / (sample.size() * width);
    os << g17(lo) << ',' << g17(lo + width) << ',' << clock_hhmm(Angle(lo)) << ','
       << count[static_cast<std::size_t>(b)] << ',' << g17(freq) << '\n';
  }
}

}  // namespace kjmix
