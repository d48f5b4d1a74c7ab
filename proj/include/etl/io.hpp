#pragma once

// io.hpp
//
// JSON file formats for embeddings and traces.
//   embedding: {"kind":"vector","data":[...]} or
//              {"kind":"patch_set","data":[[...],...]}
//   trace:     a JSON array of embedding objects, or one embedding
//              object per line (JSON Lines)

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "etl/core.hpp"

namespace etl {

inline Embedding embedding_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("data"))
    throw Error(Errc::schema_error,
                "embedding must be {\"kind\": ..., \"data\": ...}");
  const std::string kind = j.at("kind").get<std::string>();
  const auto& data = j.at("data");
  if (!data.is_array() || data.empty())
    throw Error(Errc::schema_error, "embedding data must be a non-empty array");

  std::vector<std::vector<double>> rows;
  if (data.front().is_array()) {
    for (const auto& row : data)
      rows.push_back(row.get<std::vector<double>>());
  } else {
    rows.push_back(data.get<std::vector<double>>());
  }

  if (kind == "vector") return make_embedding(Kind::vector, rows);
  if (kind == "patch_set") return make_embedding(Kind::patch_set, rows);
  throw Error(Errc::schema_error, "unknown embedding kind '" + kind + "'");
}

inline nlohmann::json embedding_to_json(const Embedding& e) {
  nlohmann::json j;
  j["kind"] = kind_name(e.kind());
  if (e.kind() == Kind::vector) {
    j["data"] = std::vector<double>(e.flat().begin(), e.flat().end());
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < e.patch_count(); ++i) {
      auto p = e.patch(i);
      rows.push_back(std::vector<double>(p.begin(), p.end()));
    }
    j["data"] = rows;
  }
  return j;
}

inline nlohmann::json trace_to_json(const Trace& t) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : t) arr.push_back(embedding_to_json(e));
  return arr;
}

inline Trace trace_from_json(const nlohmann::json& arr) {
  if (!arr.is_array())
    throw Error(Errc::schema_error, "trace must be a JSON array of embeddings");
  std::vector<Embedding> items;
  for (const auto& j : arr) items.push_back(embedding_from_json(j));
  return Trace(std::move(items));
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline nlohmann::json parse_json(const std::string& text,
                                 const std::string& origin) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw Error(Errc::schema_error, "invalid JSON in '" + origin + "'");
  return j;
}

}  // namespace detail

inline Embedding load_embedding(const std::string& path) {
  return embedding_from_json(
      detail::parse_json(detail::read_file(path), path));
}

/// Embeddings from a JSON array or JSON Lines file, with no shape
/// constraint between entries.
inline std::vector<Embedding> load_embedding_list(const std::string& path) {
  const std::string text = detail::read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos)
    throw Error(Errc::schema_error, "empty embedding file '" + path + "'");

  std::vector<Embedding> items;
  if (text[first] == '[') {
    const nlohmann::json arr = detail::parse_json(text, path);
    if (!arr.is_array())
      throw Error(Errc::schema_error,
                  "expected a JSON array of embeddings in '" + path + "'");
    for (const auto& j : arr) items.push_back(embedding_from_json(j));
    return items;
  }

  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw Error(Errc::schema_error, "invalid JSON on line " +
                                          std::to_string(lineno) + " of '" +
                                          path + "'");
    items.push_back(embedding_from_json(j));
  }
  return items;
}

/// Accepts both a JSON array of embeddings and JSON Lines (one
/// embedding object per line).
inline Trace load_trace(const std::string& path) {
  return Trace(load_embedding_list(path));
}

inline void save_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace etl
