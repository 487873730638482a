#include "telemat/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "telemat/errors.hpp"

namespace telemat::io {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(item);
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

json parse_document(std::istream& in, const std::string& source) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": malformed document: " + e.what());
  }
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  return in;
}

}  // namespace

std::vector<Index> parse_digits(const QuditDims& dims, const std::string& index) {
  std::vector<Index> digits;
  if (index.find(',') != std::string::npos) {
    for (const auto& tok : split_csv(index)) {
      if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError("index '" + index + "': bad digit '" + tok + "'");
      }
      digits.push_back(static_cast<Index>(std::stoull(tok)));
    }
  } else {
    for (char ch : index) {
      if (ch >= '0' && ch <= '9') {
        digits.push_back(static_cast<Index>(ch - '0'));
      } else if (ch >= 'a' && ch <= 'z') {
        digits.push_back(static_cast<Index>(ch - 'a' + 10));
      } else {
        throw ParseError("index '" + index + "': bad digit character '" + std::string(1, ch) + "'");
      }
    }
  }
  if (digits.size() != dims.particles()) {
    throw ParseError("index '" + index + "' has " + std::to_string(digits.size()) + " digits, expected " +
                     std::to_string(dims.particles()));
  }
  for (Index k = 0; k < digits.size(); ++k) {
    if (digits[k] >= dims[k]) {
      throw ParseError("index '" + index + "': digit " + std::to_string(digits[k]) + " out of range for particle " +
                       std::to_string(k) + " of dimension " + std::to_string(dims[k]));
    }
  }
  return digits;
}

std::string format_digits(const QuditDims& dims, Index flat) {
  const auto digits = basis_digits(dims, flat);
  bool compact = true;
  for (Index d : dims.dims()) compact = compact && d <= 10;
  std::string out;
  for (Index k = 0; k < digits.size(); ++k) {
    if (compact) {
      out.push_back(static_cast<char>('0' + digits[k]));
    } else {
      if (k) out.push_back(',');
      out += std::to_string(digits[k]);
    }
  }
  return out;
}

PureState<double> state_from_json(const json& doc, const std::string& where) {
  const json& version = require(doc, "version", where);
  if (!version.is_number_integer() || version.get<int>() != kFormatVersion) {
    throw ParseError(where + ".version: unsupported version " + version.dump());
  }
  const json& particles = require(doc, "particles", where);
  if (!particles.is_array() || particles.empty()) throw ParseError(where + ".particles: expected a non-empty array");
  std::vector<Index> dims;
  std::vector<std::string> labels;
  for (std::size_t p = 0; p < particles.size(); ++p) {
    const std::string at = where + ".particles[" + std::to_string(p) + "]";
    const json& dim = require(particles[p], "dim", at);
    if (!dim.is_number_integer() || dim.get<long long>() < 2) throw ParseError(at + ".dim: expected an integer >= 2");
    dims.push_back(dim.get<Index>());
    auto label = particles[p].find("label");
    if (label != particles[p].end()) {
      if (!label->is_string()) throw ParseError(at + ".label: expected a string");
      labels.push_back(label->get<std::string>());
    } else {
      labels.push_back(std::to_string(p + 1));
    }
  }
  QuditDims qd = [&] {
    try {
      return QuditDims(dims, labels);
    } catch (const Error& e) {
      throw ParseError(where + ".particles: " + e.what());
    }
  }();

  CVector<double> amps = CVector<double>::Zero(static_cast<Eigen::Index>(qd.total()));
  const json& list = require(doc, "amplitudes", where);
  if (!list.is_array()) throw ParseError(where + ".amplitudes: expected an array");
  std::set<Index> seen;
  for (std::size_t a = 0; a < list.size(); ++a) {
    const std::string at = where + ".amplitudes[" + std::to_string(a) + "]";
    const json& idx = require(list[a], "index", at);
    if (!idx.is_string()) throw ParseError(at + ".index: expected a digit string");
    Index flat = 0;
    try {
      flat = basis_index(qd, parse_digits(qd, idx.get<std::string>()));
    } catch (const ParseError& e) {
      throw ParseError(at + ".index: " + e.what());
    }
    if (!seen.insert(flat).second) {
      throw ParseError(at + ".index: duplicate index '" + idx.get<std::string>() + "'");
    }
    const double re = number(require(list[a], "re", at), at + ".re");
    auto im_it = list[a].find("im");
    const double im = im_it == list[a].end() ? 0.0 : number(*im_it, at + ".im");
    amps(static_cast<Eigen::Index>(flat)) = {re, im};
  }

  bool normalized = false;
  if (auto it = doc.find("normalized"); it != doc.end()) {
    if (!it->is_boolean()) throw ParseError(where + ".normalized: expected true or false");
    normalized = it->get<bool>();
  }
  try {
    return PureState<double>(std::move(qd), std::move(amps), normalized);
  } catch (const ValidationError& e) {
    throw ValidationError(where + ".normalized: " + e.what());
  }
}

json state_to_json(const PureState<double>& state) {
  json doc;
  doc["version"] = kFormatVersion;
  json particles = json::array();
  for (Index p = 0; p < state.dims().particles(); ++p) {
    json entry{{"dim", state.dims()[p]}};
    if (state.dims().labelled()) entry["label"] = state.dims().labels()[p];
    particles.push_back(std::move(entry));
  }
  doc["particles"] = std::move(particles);
  json amps = json::array();
  for (Index i = 0; i < state.size(); ++i) {
    const auto z = state[i];
    if (z == std::complex<double>(0)) continue;
    amps.push_back({{"index", format_digits(state.dims(), i)}, {"re", z.real()}, {"im", z.imag()}});
  }
  doc["amplitudes"] = std::move(amps);
  doc["normalized"] = state.normalized();
  return doc;
}

PureState<double> parse_state(std::istream& in, const std::string& source) {
  return state_from_json(parse_document(in, source), source);
}

PureState<double> parse_state_file(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_state(in, path.string());
}

void write_state(std::ostream& out, const PureState<double>& state) { out << state_to_json(state).dump(2) << '\n'; }

std::vector<PureState<double>> parse_basis(std::istream& in, const std::string& source) {
  const json doc = parse_document(in, source);
  const json& version = require(doc, "version", source);
  if (!version.is_number_integer() || version.get<int>() != kFormatVersion) {
    throw ParseError(source + ".version: unsupported version " + version.dump());
  }
  const json& states = require(doc, "states", source);
  if (!states.is_array() || states.empty()) throw ParseError(source + ".states: expected a non-empty array");
  std::vector<PureState<double>> out;
  for (std::size_t r = 0; r < states.size(); ++r) {
    json element = states[r];
    if (element.is_object() && !element.contains("version")) element["version"] = kFormatVersion;
    out.push_back(state_from_json(element, source + ".states[" + std::to_string(r) + "]"));
  }
  return out;
}

std::vector<PureState<double>> parse_basis_file(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_basis(in, path.string());
}

json basis_to_json(const std::vector<PureState<double>>& states) {
  json doc{{"version", kFormatVersion}, {"states", json::array()}};
  for (const auto& s : states) doc["states"].push_back(state_to_json(s));
  return doc;
}

Bipartition parse_partition(const QuditDims& dims, const std::string& bob, const std::string& alice) {
  auto resolve = [&](const std::string& csv, const char* who) {
    std::vector<Index> slots;
    for (const auto& label : split_csv(csv)) {
      auto slot = dims.slot_of(label);
      if (!slot) throw InvalidPartition(std::string(who) + ": unknown particle label '" + label + "'");
      slots.push_back(*slot);
    }
    return slots;
  };
  Bipartition p{resolve(bob, "--bob"), resolve(alice, "--alice")};
  p.validate(dims.particles());
  return p;
}

}  // namespace telemat::io
