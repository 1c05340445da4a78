#include <json.hpp>
#include <map>
#include <sstream>
#include <string>

#include "hbvm/errors.hpp"
#include "hbvm/format.hpp"
#include "hbvm/tableau.hpp"

namespace hbvm {

using json = nlohmann::ordered_json;

TableauFormat format_from_string(std::string_view name) {
  if (name == "json") return TableauFormat::Json;
  if (name == "csv") return TableauFormat::Csv;
  throw FormatError("unknown tableau format '" + std::string(name) + "'");
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::VectorXd vector_from_json(const json& j, int k, const char* key) {
  if (!j.is_array() || static_cast<int>(j.size()) != k)
    throw FormatError(std::string("'") + key + "' must be an array of k numbers");
  Eigen::VectorXd v(k);
  for (int i = 0; i < k; ++i) v[i] = j[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, int k, const char* key) {
  if (!j.is_array() || static_cast<int>(j.size()) != k)
    throw FormatError(std::string("'") + key + "' must have k rows");
  Eigen::MatrixXd m(k, k);
  for (int i = 0; i < k; ++i) m.row(i) = vector_from_json(j[i], k, key).transpose();
  return m;
}

std::string to_json_text(const AnyTableau& tableau) {
  json out;
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ButcherTableauRK>) {
          out["family"] = std::string(to_string(t.family));
        } else {
          out["family"] = std::string(to_string(Family::HbvmRkn));
        }
        out["k"] = t.k;
        out["s"] = t.s;
        out["c"] = vector_to_json(t.c);
        out["b"] = vector_to_json(t.b);
        if constexpr (std::is_same_v<T, ButcherTableauRK>) {
          out["A"] = matrix_to_json(t.A);
        } else {
          out["b_bar"] = vector_to_json(t.b_bar);
          out["A_bar"] = matrix_to_json(t.A_bar);
        }
      },
      tableau);
  return out.dump(2) + "\n";
}

AnyTableau from_json_text(std::string_view bytes) {
  json in;
  try {
    in = json::parse(bytes.begin(), bytes.end());
    const Family family = family_from_string(in.at("family").get<std::string>());
    const int k = in.at("k").get<int>();
    const int s = in.at("s").get<int>();
    if (k < 1 || s < 1) throw FormatError("k and s must be positive");
    if (family == Family::HbvmRkn) {
      ButcherTableauRKN t;
      t.k = k;
      t.s = s;
      t.c = vector_from_json(in.at("c"), k, "c");
      t.b = vector_from_json(in.at("b"), k, "b");
      t.b_bar = vector_from_json(in.at("b_bar"), k, "b_bar");
      t.A_bar = matrix_from_json(in.at("A_bar"), k, "A_bar");
      return t;
    }
    ButcherTableauRK t;
    t.family = family;
    t.k = k;
    t.s = s;
    t.c = vector_from_json(in.at("c"), k, "c");
    t.b = vector_from_json(in.at("b"), k, "b");
    t.A = matrix_from_json(in.at("A"), k, "A");
    return t;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed tableau JSON: ") + e.what());
  }
}

std::string vector_csv(const Eigen::VectorXd& v) {
  std::string out = "i,value\n";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out += std::to_string(i) + "," + format_double(v[i]) + "\n";
  return out;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::string out = "i,j,value\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out += std::to_string(i) + "," + std::to_string(j) + "," + format_double(m(i, j)) + "\n";
  return out;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& content,
                                              const std::string& header) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw FormatError("CSV header must be '" + header + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream fs(line);
    std::string field;
    while (std::getline(fs, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

int parse_index(const std::string& text, int bound) {
  const double v = parse_double(text);
  const int i = static_cast<int>(v);
  if (v != i || i < 0 || i >= bound) throw FormatError("CSV index out of range: " + text);
  return i;
}

Eigen::VectorXd vector_from_csv(const std::string& content, int k) {
  const auto rows = csv_rows(content, "i,value");
  if (static_cast<int>(rows.size()) != k) throw FormatError("CSV vector must have k rows");
  Eigen::VectorXd v(k);
  for (const auto& r : rows) {
    if (r.size() != 2) throw FormatError("CSV vector row must have 2 fields");
    v[parse_index(r[0], k)] = parse_double(r[1]);
  }
  return v;
}

Eigen::MatrixXd matrix_from_csv(const std::string& content, int k) {
  const auto rows = csv_rows(content, "i,j,value");
  if (static_cast<int>(rows.size()) != k * k) throw FormatError("CSV matrix must have k*k rows");
  Eigen::MatrixXd m(k, k);
  for (const auto& r : rows) {
    if (r.size() != 3) throw FormatError("CSV matrix row must have 3 fields");
    m(parse_index(r[0], k), parse_index(r[1], k)) = parse_double(r[2]);
  }
  return m;
}

}  // namespace

std::vector<CsvDocument> export_csv_documents(const AnyTableau& tableau) {
  std::vector<CsvDocument> docs;
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        Family family = Family::HbvmRkn;
        if constexpr (std::is_same_v<T, ButcherTableauRK>) family = t.family;
        docs.push_back({"meta.csv", "key,value\nfamily," + std::string(to_string(family)) +
                                        "\nk," + std::to_string(t.k) + "\ns," +
                                        std::to_string(t.s) + "\n"});
        docs.push_back({"c.csv", vector_csv(t.c)});
        docs.push_back({"b.csv", vector_csv(t.b)});
        if constexpr (std::is_same_v<T, ButcherTableauRK>) {
          docs.push_back({"A.csv", matrix_csv(t.A)});
        } else {
          docs.push_back({"b_bar.csv", vector_csv(t.b_bar)});
          docs.push_back({"A_bar.csv", matrix_csv(t.A_bar)});
        }
      },
      tableau);
  return docs;
}

AnyTableau import_csv_documents(const std::vector<CsvDocument>& documents) {
  std::map<std::string, std::string> by_name;
  for (const auto& d : documents) by_name[d.name] = d.content;
  auto get = [&](const std::string& name) -> const std::string& {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError("missing CSV document " + name);
    return it->second;
  };
  std::map<std::string, std::string> meta;
  for (const auto& r : csv_rows(get("meta.csv"), "key,value")) {
    if (r.size() != 2) throw FormatError("meta.csv rows must have 2 fields");
    meta[r[0]] = r[1];
  }
  if (!meta.count("family") || !meta.count("k") || !meta.count("s"))
    throw FormatError("meta.csv must define family, k and s");
  const Family family = family_from_string(meta["family"]);
  const int k = parse_index(meta["k"], 1 << 20);
  const int s = parse_index(meta["s"], 1 << 20);
  if (k < 1 || s < 1) throw FormatError("k and s must be positive");
  if (family == Family::HbvmRkn) {
    ButcherTableauRKN t;
    t.k = k;
    t.s = s;
    t.c = vector_from_csv(get("c.csv"), k);
    t.b = vector_from_csv(get("b.csv"), k);
    t.b_bar = vector_from_csv(get("b_bar.csv"), k);
    t.A_bar = matrix_from_csv(get("A_bar.csv"), k);
    return t;
  }
  ButcherTableauRK t;
  t.family = family;
  t.k = k;
  t.s = s;
  t.c = vector_from_csv(get("c.csv"), k);
  t.b = vector_from_csv(get("b.csv"), k);
  t.A = matrix_from_csv(get("A.csv"), k);
  return t;
}

std::string export_tableau(const AnyTableau& tableau, TableauFormat format) {
  if (format == TableauFormat::Json) return to_json_text(tableau);
  std::string out;
  for (const auto& d : export_csv_documents(tableau)) out += "## " + d.name + "\n" + d.content;
  return out;
}

AnyTableau import_tableau(std::string_view bytes, TableauFormat format) {
  if (format == TableauFormat::Json) return from_json_text(bytes);
  std::vector<CsvDocument> docs;
  std::istringstream in{std::string(bytes)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("## ", 0) == 0) {
      docs.push_back({line.substr(3), ""});
    } else if (!docs.empty()) {
      docs.back().content += line + "\n";
    } else if (!line.empty()) {
      throw FormatError("CSV bundle must start with a '## <name>' line");
    }
  }
  return import_csv_documents(docs);
}

}  // namespace hbvm
