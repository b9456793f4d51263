#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "gbsel/groebner.hpp"
#include "gbsel/ideal_gen.hpp"
#include "json.hpp"

namespace gbsel {

/// An ideal read from disk: generators plus where they came from, if known.
struct IdealFile {
  std::vector<Polynomial> generators;
  std::optional<DistributionSpec> spec;
  std::optional<std::uint64_t> seed;
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

inline bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace detail

/// One polynomial per line; '#' starts a comment; blank lines are skipped.
/// With nvars = 0 the variable count is the highest index used plus one.
inline std::vector<Polynomial> read_ideal_text(std::istream& is, int nvars = 0, PrimeField field = PrimeField{}) {
  std::vector<std::pair<int, std::string>> lines;
  std::string line;
  for (int number = 1; std::getline(is, line); ++number) {
    std::string body = detail::strip_comment(line);
    if (!detail::blank(body)) lines.emplace_back(number, std::move(body));
  }
  if (lines.empty()) throw ParseError("ideal has no generators");
  if (nvars == 0) {
    for (const auto& [number, text] : lines) nvars = std::max(nvars, infer_nvars(text));
    nvars = std::max(nvars, 1);
  }
  std::vector<Polynomial> out;
  for (const auto& [number, text] : lines) {
    Polynomial p = parse_polynomial(text, nvars, field, number);
    if (p.is_zero()) throw ParseError("generator is zero", number, 1);
    out.push_back(std::move(p));
  }
  return out;
}

/// {"spec": "...", "seed": k, "generators": ["...", ...]} with optional "nvars".
inline IdealFile ideal_from_json(const nlohmann::json& j, PrimeField field = PrimeField{}) {
  IdealFile f;
  try {
    int nvars = 0;
    if (j.contains("spec")) {
      f.spec = parse_spec(j.at("spec").get<std::string>());
      nvars = f.spec->n;
      field = f.spec->field();
    }
    if (j.contains("seed")) f.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("nvars")) nvars = j.at("nvars").get<int>();
    const auto& gens = j.at("generators");
    if (!gens.is_array() || gens.empty()) throw ParseError("'generators' must be a non-empty array");
    if (nvars == 0)
      for (const auto& g : gens) nvars = std::max(nvars, infer_nvars(g.get<std::string>()));
    nvars = std::max(nvars, 1);
    int k = 0;
    for (const auto& g : gens) {
      ++k;
      try {
        Polynomial p = parse_polynomial(g.get<std::string>(), nvars, field);
        if (p.is_zero()) throw ParseError("generator is zero");
        f.generators.push_back(std::move(p));
      } catch (const ParseError& e) {
        throw ParseError("generator " + std::to_string(k) + ": " + e.what());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad ideal JSON: ") + e.what());
  }
  return f;
}

inline nlohmann::json ideal_to_json(const IdealSample& s) {
  nlohmann::json gens = nlohmann::json::array();
  for (const Polynomial& g : s.generators) gens.push_back(to_string(g));
  return {{"spec", to_string(s.spec)}, {"seed", s.seed}, {"generators", std::move(gens)}};
}

/// Read an ideal file, JSON if it starts with '{', text otherwise.
inline IdealFile read_ideal_file(const std::string& path, int nvars = 0, PrimeField field = PrimeField{}) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << is.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("bad ideal JSON: ") + e.what());
    }
    return ideal_from_json(j, field);
  }
  std::istringstream ts(text);
  return IdealFile{read_ideal_text(ts, nvars, field), std::nullopt, std::nullopt};
}

inline nlohmann::json stats_to_json(const RunStats& s) {
  return {{"additions", s.additions},     {"pairs_processed", s.pairs_processed},
          {"zero_reductions", s.zero_reductions}, {"basis_size", s.basis_size},
          {"deg_max", s.deg_max},         {"dimension", s.dimension},
          {"truncated", s.truncated},     {"generators", s.generators}};
}

}  // namespace gbsel
