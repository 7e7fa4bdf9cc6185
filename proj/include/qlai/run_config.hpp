#pragma once

// Flat key=value run configuration with one section per pulse:
//
//   tol=1e-14
//   agreement_tol=1e-8
//   [pulse0] type=coherent magnitude=1.414 phase=0.3 theta_area=1.5708 theta_coupling=0
//   [pulse1] type=two_fock m=2 n=4 gamma=0.7071 eta=0.7071 delta=0.1
//   [pulse2] type=fock n=3 nbar=2.5
//   [oracle] J=3 T=1e-3 omega=1e3
//
// Pairs may sit on the section line or on the lines below it; '#' starts a
// comment. Unknown keys and keys that do not belong to the pulse type are
// rejected.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "qlai/error.hpp"
#include "qlai/fields.hpp"
#include "qlai/interferometer.hpp"
#include "qlai/oracle.hpp"

namespace qlai {

/// Shortest decimal form that is still written with 17 significant digits.
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct RunConfig {
  MzConfig mz;
  HilbertConfig oracle;
  bool oracle_n_max_set = false;  // false: sized from the states
  double agreement_tol = 1e-8;
};

namespace detail {

inline double parse_real(std::string_view key, const std::string& value, int line) {
  double out = 0.0;
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || !std::isfinite(out)) {
    throw Error(ErrorKind::invalid_argument, "line " + std::to_string(line) + ": '" + std::string(key) +
                                                 "' expects a real number, got '" + value + "'");
  }
  return out;
}

inline std::size_t parse_count(std::string_view key, const std::string& value, int line) {
  std::size_t out = 0;
  const auto* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), last, out);
  if (ec != std::errc{} || ptr != last) {
    throw Error(ErrorKind::invalid_argument, "line " + std::to_string(line) + ": '" + std::string(key) +
                                                 "' expects a non-negative integer, got '" + value + "'");
  }
  return out;
}

// "re:im,re:im,..." ; a bare "re" means zero imaginary part.
inline std::vector<complex> parse_amplitudes(const std::string& value, int line) {
  std::vector<complex> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    const double re = parse_real("amplitudes", item.substr(0, colon), line);
    const double im = colon == std::string::npos ? 0.0 : parse_real("amplitudes", item.substr(colon + 1), line);
    out.emplace_back(re, im);
  }
  if (out.empty()) throw Error(ErrorKind::invalid_argument, "line " + std::to_string(line) + ": empty amplitudes");
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};
using Section = std::map<std::string, Entry>;

inline PulseSpec build_pulse(std::size_t index, const Section& section, double default_area) {
  const std::string where = "[pulse" + std::to_string(index) + "]";
  auto get = [&](const char* key) -> const Entry* {
    auto it = section.find(key);
    return it == section.end() ? nullptr : &it->second;
  };
  auto real_or = [&](const char* key, double fallback) {
    const Entry* e = get(key);
    return e ? parse_real(key, e->value, e->line) : fallback;
  };
  auto require = [&](const char* key) -> const Entry& {
    const Entry* e = get(key);
    if (!e) throw Error(ErrorKind::invalid_argument, where + ": missing key '" + key + "'");
    return *e;
  };

  const Entry* type_entry = get("type");
  const std::string type = type_entry ? type_entry->value : "classical";
  std::vector<std::string> allowed = {"type", "theta_area", "theta_coupling", "nbar"};
  FieldState state;
  if (type == "classical") {
    state = Classical{};
  } else if (type == "fock") {
    allowed.push_back("n");
    const Entry& n = require("n");
    state = Fock{parse_count("n", n.value, n.line)};
  } else if (type == "coherent") {
    allowed.insert(allowed.end(), {"magnitude", "phase"});
    state = Coherent(real_or("magnitude", 0.0), real_or("phase", 0.0));
  } else if (type == "two_fock") {
    allowed.insert(allowed.end(), {"m", "n", "gamma", "eta", "delta"});
    const Entry& m = require("m");
    const Entry& n = require("n");
    const double gamma = real_or("gamma", std::numbers::sqrt2 / 2.0);
    const double eta = real_or("eta", std::sqrt(std::max(0.0, 1.0 - gamma * gamma)));
    state = TwoFock(parse_count("m", m.value, m.line), parse_count("n", n.value, n.line), gamma, eta,
                    real_or("delta", 0.0));
  } else if (type == "general") {
    allowed.push_back("amplitudes");
    const Entry& a = require("amplitudes");
    state = General(parse_amplitudes(a.value, a.line));
  } else {
    throw Error(ErrorKind::invalid_argument, where + ": unknown field type '" + type + "'");
  }
  for (const auto& [key, entry] : section) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorKind::invalid_argument, "line " + std::to_string(entry.line) + ": key '" + key +
                                                   "' is not valid for " + where + " type=" + type);
    }
  }

  double nbar = 1.0;
  if (const Entry* e = get("nbar")) {
    nbar = parse_real("nbar", e->value, e->line);
  } else if (!is_classical(state)) {
    const double mean = mean_photon_number(state);
    nbar = mean > 0.0 ? mean : 1.0;
  }
  return PulseSpec(real_or("theta_area", default_area), nbar, real_or("theta_coupling", 0.0), std::move(state));
}

inline void apply_oracle_section(RunConfig& run, const Section& section) {
  auto& o = run.oracle;
  for (const auto& [key, e] : section) {
    if (key == "J") {
      o.lattice_half_width = static_cast<int>(parse_count(key, e.value, e.line));
    } else if (key == "T") {
      o.duration = parse_real(key, e.value, e.line);
    } else if (key == "omega") {
      o.omega = parse_real(key, e.value, e.line);
    } else if (key == "omega_a") {
      o.omega_atom = parse_real(key, e.value, e.line);
    } else if (key == "mass") {
      o.mass = parse_real(key, e.value, e.line);
    } else if (key == "p0") {
      o.p0 = parse_real(key, e.value, e.line);
    } else if (key == "hbar_k") {
      o.hbar_k = parse_real(key, e.value, e.line);
    } else if (key == "harmonics") {
      o.harmonics = static_cast<int>(parse_count(key, e.value, e.line));
    } else if (key == "n_max") {
      // one value for all modes or three comma-separated values
      std::vector<std::size_t> sizes;
      std::stringstream ss(e.value);
      std::string item;
      while (std::getline(ss, item, ',')) sizes.push_back(parse_count(key, item, e.line));
      if (sizes.size() == 1) sizes.assign(3, sizes.front());
      if (sizes.size() != 3) {
        throw Error(ErrorKind::invalid_argument, "line " + std::to_string(e.line) + ": n_max takes 1 or 3 values");
      }
      for (std::size_t l = 0; l < 3; ++l) o.n_max[l] = sizes[l];
      run.oracle_n_max_set = true;
    } else {
      throw Error(ErrorKind::invalid_argument, "line " + std::to_string(e.line) + ": unknown key '" + key +
                                                   "' in [oracle]");
    }
  }
  o.validate();
}

}  // namespace detail

inline RunConfig parse_run_config(std::istream& in) {
  std::map<std::string, detail::Section> sections;
  std::string current;  // "" holds the global keys
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream tokens(raw);
    std::string token;
    while (tokens >> token) {
      if (token.front() == '[') {
        if (token.back() != ']' || token.size() < 3) {
          throw Error(ErrorKind::invalid_argument, "line " + std::to_string(line) + ": bad section '" + token + "'");
        }
        current = token.substr(1, token.size() - 2);
        if (current != "pulse0" && current != "pulse1" && current != "pulse2" && current != "oracle") {
          throw Error(ErrorKind::invalid_argument, "line " + std::to_string(line) + ": unknown section [" +
                                                       current + "]");
        }
        if (sections.count(current)) {
          throw Error(ErrorKind::invalid_argument, "line " + std::to_string(line) + ": duplicate section [" +
                                                       current + "]");
        }
        sections[current];
        continue;
      }
      const auto eq = token.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == token.size()) {
        throw Error(ErrorKind::invalid_argument, "line " + std::to_string(line) + ": expected key=value, got '" +
                                                     token + "'");
      }
      const std::string key = token.substr(0, eq);
      auto& section = sections[current];
      if (section.count(key)) {
        throw Error(ErrorKind::invalid_argument, "line " + std::to_string(line) + ": duplicate key '" + key + "'");
      }
      section[key] = {token.substr(eq + 1), line};
    }
  }

  RunConfig run;
  for (const auto& [key, e] : sections[""]) {
    if (key == "tol") {
      run.mz.tol = detail::parse_real(key, e.value, e.line);
    } else if (key == "agreement_tol") {
      run.agreement_tol = detail::parse_real(key, e.value, e.line);
    } else {
      throw Error(ErrorKind::invalid_argument, "line " + std::to_string(e.line) + ": unknown key '" + key + "'");
    }
  }
  if (!(run.mz.tol > 0.0 && run.mz.tol < 1.0)) throw Error(ErrorKind::invalid_argument, "tol must lie in (0, 1)");
  if (!(run.agreement_tol > 0.0)) throw Error(ErrorKind::invalid_argument, "agreement_tol must be > 0");
  for (std::size_t l = 0; l < 3; ++l) {
    const std::string name = "pulse" + std::to_string(l);
    if (!sections.count(name)) throw Error(ErrorKind::invalid_argument, "missing section [" + name + "]");
    run.mz.pulses[l] = detail::build_pulse(l, sections[name], kDefaultAreas[l]);
  }
  if (sections.count("oracle")) detail::apply_oracle_section(run, sections["oracle"]);
  return run;
}

inline RunConfig parse_run_config(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in);
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_argument, "cannot open config file '" + path + "'");
  return parse_run_config(in);
}

/// Pulse state as config key=value pairs, values with 17 significant digits.
inline std::string state_config_text(const FieldState& state) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Classical>) {
          return "type=classical";
        } else if constexpr (std::is_same_v<T, Fock>) {
          return "type=fock n=" + std::to_string(s.n);
        } else if constexpr (std::is_same_v<T, Coherent>) {
          return "type=coherent magnitude=" + format_double(s.magnitude) + " phase=" + format_double(s.phase);
        } else if constexpr (std::is_same_v<T, TwoFock>) {
          return "type=two_fock m=" + std::to_string(s.m) + " n=" + std::to_string(s.n) +
                 " gamma=" + format_double(s.gamma) + " eta=" + format_double(s.eta) +
                 " delta=" + format_double(s.delta);
        } else {
          std::string out = "type=general amplitudes=";
          const auto& a = s.amplitudes();
          for (std::size_t i = 0; i < a.size(); ++i) {
            if (i) out += ',';
            out += format_double(a[i].real()) + ':' + format_double(a[i].imag());
          }
          return out;
        }
      },
      state);
}

/// Fully resolved configuration in the input format. Parsing this text gives
/// back the same run.
inline std::string to_config_text(const RunConfig& run) {
  std::string out = "tol=" + format_double(run.mz.tol) + "\nagreement_tol=" + format_double(run.agreement_tol) + "\n";
  for (std::size_t l = 0; l < 3; ++l) {
    const auto& p = run.mz.pulses[l];
    out += "[pulse" + std::to_string(l) + "] " + state_config_text(p.state) +
           " theta_area=" + format_double(p.theta_area) + " theta_coupling=" + format_double(p.theta_coupling) +
           " nbar=" + format_double(p.nbar) + "\n";
  }
  const auto& o = run.oracle;
  out += "[oracle] J=" + std::to_string(o.lattice_half_width) + " T=" + format_double(o.duration) +
         " omega=" + format_double(o.omega) + " omega_a=" + format_double(o.omega_atom) +
         " mass=" + format_double(o.mass) + " p0=" + format_double(o.p0) + " hbar_k=" + format_double(o.hbar_k) +
         " harmonics=" + std::to_string(o.harmonics);
  if (run.oracle_n_max_set) {
    out += " n_max=" + std::to_string(o.n_max[0]) + "," + std::to_string(o.n_max[1]) + "," +
           std::to_string(o.n_max[2]);
  }
  return out + "\n";
}

}  // namespace qlai
