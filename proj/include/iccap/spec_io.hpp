// SPDX-License-Identifier: Apache-2.0
//
// Serialized channel descriptions: a strict JSON object holding exactly one
// of the three supported forms,
//   {"matrices": {"t": 2, "h1": [...row-major t*t...], ..., "P1": , "P2": }}
//   {"parallel": {"h1": [...t gains...], ..., "P1": , "P2": }}
//   {"scalar":   {"a": , "b": , "P1": , "P2": }}
// Serialization round-trips every number bit for bit.

#pragma once

#include <string>

#include <json.hpp>

#include "iccap/channel.hpp"
#include "iccap/errors.hpp"

namespace iccap {

struct ChannelSpec {
  enum class Kind { matrices, parallel, scalar };
  Kind kind = Kind::scalar;
  Index t = 1;
  // matrices form
  Mat h1, h2, h3, h4;
  // parallel form
  Vec g1, g2, g3, g4;
  // scalar form
  double a = 0.0, b = 0.0;
  // all forms
  double p1 = 0.0, p2 = 0.0;
};

namespace detail {

using nlohmann::json;

inline const json& spec_object(const json& j, const char* key) {
  const json& o = j.at(key);
  if (!o.is_object())
    throw ParseError(std::string("spec: '") + key + "' must be an object");
  return o;
}

inline double spec_number(const json& o, const char* key) {
  if (!o.contains(key))
    throw ParseError(std::string("spec: missing key '") + key + "'");
  const json& v = o.at(key);
  if (!v.is_number())
    throw ParseError(std::string("spec: '") + key + "' must be a number");
  return v.get<double>();
}

inline Vec spec_array(const json& o, const char* key, Index expect) {
  if (!o.contains(key))
    throw ParseError(std::string("spec: missing key '") + key + "'");
  const json& v = o.at(key);
  if (!v.is_array())
    throw ParseError(std::string("spec: '") + key + "' must be an array");
  if (expect >= 0 && static_cast<Index>(v.size()) != expect)
    throw ParseError(std::string("spec: '") + key + "' must have " +
                     std::to_string(expect) + " entries, got " +
                     std::to_string(v.size()));
  Vec out(static_cast<Index>(v.size()));
  for (Index i = 0; i < out.size(); ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number())
      throw ParseError(std::string("spec: '") + key +
                       "' entries must be numbers");
    out(i) = v[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

inline void spec_reject_unknown(const json& o,
                                std::initializer_list<const char*> allowed,
                                const char* where) {
  for (const auto& [key, value] : o.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || key == k;
    if (!ok)
      throw ParseError(std::string("spec: unknown key '") + key + "' in " +
                       where);
  }
}

inline Mat spec_matrix(const json& o, const char* key, Index t) {
  const Vec flat = spec_array(o, key, t * t);
  Mat m(t, t);
  for (Index i = 0; i < t; ++i)
    for (Index j = 0; j < t; ++j) m(i, j) = flat(i * t + j);
  return m;
}

inline json matrix_to_json(const Mat& m) {
  json arr = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  return arr;
}

inline json vector_to_json(const Vec& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

}  // namespace detail

inline ChannelSpec parse_spec(const std::string& text) {
  using detail::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("spec: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("spec: top level must be an object");
  detail::spec_reject_unknown(j, {"matrices", "parallel", "scalar"},
                              "top level");
  const int forms = static_cast<int>(j.contains("matrices")) +
                    static_cast<int>(j.contains("parallel")) +
                    static_cast<int>(j.contains("scalar"));
  if (forms != 1)
    throw ParseError(
        "spec: exactly one of 'matrices', 'parallel', 'scalar' required");

  ChannelSpec s;
  if (j.contains("matrices")) {
    const json& o = detail::spec_object(j, "matrices");
    detail::spec_reject_unknown(o, {"t", "h1", "h2", "h3", "h4", "P1", "P2"},
                                "'matrices'");
    if (!o.contains("t") || !o.at("t").is_number_integer())
      throw ParseError("spec: 'matrices' needs an integer 't'");
    const auto t_raw = o.at("t").get<long long>();
    if (t_raw < 1) throw ParseError("spec: 't' must be at least 1");
    s.kind = ChannelSpec::Kind::matrices;
    s.t = static_cast<Index>(t_raw);
    s.h1 = detail::spec_matrix(o, "h1", s.t);
    s.h2 = detail::spec_matrix(o, "h2", s.t);
    s.h3 = detail::spec_matrix(o, "h3", s.t);
    s.h4 = detail::spec_matrix(o, "h4", s.t);
    s.p1 = detail::spec_number(o, "P1");
    s.p2 = detail::spec_number(o, "P2");
  } else if (j.contains("parallel")) {
    const json& o = detail::spec_object(j, "parallel");
    detail::spec_reject_unknown(o, {"h1", "h2", "h3", "h4", "P1", "P2"},
                                "'parallel'");
    s.kind = ChannelSpec::Kind::parallel;
    s.g1 = detail::spec_array(o, "h1", -1);
    if (s.g1.size() < 1) throw ParseError("spec: 'h1' must not be empty");
    s.t = s.g1.size();
    s.g2 = detail::spec_array(o, "h2", s.t);
    s.g3 = detail::spec_array(o, "h3", s.t);
    s.g4 = detail::spec_array(o, "h4", s.t);
    s.p1 = detail::spec_number(o, "P1");
    s.p2 = detail::spec_number(o, "P2");
  } else {
    const json& o = detail::spec_object(j, "scalar");
    detail::spec_reject_unknown(o, {"a", "b", "P1", "P2"}, "'scalar'");
    s.kind = ChannelSpec::Kind::scalar;
    s.t = 1;
    s.a = detail::spec_number(o, "a");
    s.b = detail::spec_number(o, "b");
    if (s.a < 0.0 || s.b < 0.0)
      throw ParseError("spec: interference powers 'a' and 'b' must be >= 0");
    s.p1 = detail::spec_number(o, "P1");
    s.p2 = detail::spec_number(o, "P2");
  }
  return s;
}

inline std::string serialize_spec(const ChannelSpec& s) {
  using detail::json;
  json o;
  switch (s.kind) {
    case ChannelSpec::Kind::matrices:
      o["matrices"]["t"] = static_cast<long long>(s.t);
      o["matrices"]["h1"] = detail::matrix_to_json(s.h1);
      o["matrices"]["h2"] = detail::matrix_to_json(s.h2);
      o["matrices"]["h3"] = detail::matrix_to_json(s.h3);
      o["matrices"]["h4"] = detail::matrix_to_json(s.h4);
      o["matrices"]["P1"] = s.p1;
      o["matrices"]["P2"] = s.p2;
      break;
    case ChannelSpec::Kind::parallel:
      o["parallel"]["h1"] = detail::vector_to_json(s.g1);
      o["parallel"]["h2"] = detail::vector_to_json(s.g2);
      o["parallel"]["h3"] = detail::vector_to_json(s.g3);
      o["parallel"]["h4"] = detail::vector_to_json(s.g4);
      o["parallel"]["P1"] = s.p1;
      o["parallel"]["P2"] = s.p2;
      break;
    case ChannelSpec::Kind::scalar:
      o["scalar"]["a"] = s.a;
      o["scalar"]["b"] = s.b;
      o["scalar"]["P1"] = s.p1;
      o["scalar"]["P2"] = s.p2;
      break;
  }
  return o.dump(2) + "\n";
}

// Materializes the channel and runs the model validity checks, so the
// caller sees SingularChannel / DimensionMismatch / budget errors here.
inline ChannelPair to_channel(const ChannelSpec& s) {
  ChannelPair ch;
  switch (s.kind) {
    case ChannelSpec::Kind::matrices:
      ch.h1 = s.h1;
      ch.h2 = s.h2;
      ch.h3 = s.h3;
      ch.h4 = s.h4;
      ch.p1 = s.p1;
      ch.p2 = s.p2;
      break;
    case ChannelSpec::Kind::parallel:
      ch = build_parallel(s.g1, s.g2, s.g3, s.g4, s.p1, s.p2);
      break;
    case ChannelSpec::Kind::scalar:
      ch.h1 = Mat::Constant(1, 1, 1.0);
      ch.h2 = Mat::Constant(1, 1, std::sqrt(s.a));
      ch.h3 = Mat::Constant(1, 1, std::sqrt(s.b));
      ch.h4 = Mat::Constant(1, 1, 1.0);
      ch.p1 = s.p1;
      ch.p2 = s.p2;
      break;
  }
  require_valid(ch);
  return ch;
}

}  // namespace iccap
