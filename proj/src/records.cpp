#include "advf/records.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace advf::pipeline {

using nlohmann::json;

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

bool record_less(const PredictionRecord& a, const PredictionRecord& b) {
  const std::string_view attack_a = attacks::to_string(a.attack_id);
  const std::string_view attack_b = attacks::to_string(b.attack_id);
  return std::tie(a.model_id, attack_a, a.sample_id) < std::tie(b.model_id, attack_b, b.sample_id);
}

namespace {

void append_vector(std::string& out, const Vector& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  out += ']';
}

Vector vector_field(const json& doc, const char* key) {
  const auto& node = doc.at(key);
  if (!node.is_array()) throw std::runtime_error(std::string("field '") + key + "' is not an array");
  std::vector<double> values;
  values.reserve(node.size());
  for (const auto& v : node) {
    if (!v.is_number()) throw std::runtime_error(std::string("field '") + key + "' has non-number");
    values.push_back(v.get<double>());
  }
  return Vector(std::move(values));
}

}  // namespace

std::string record_to_json_line(const PredictionRecord& r) {
  std::string out = "{\"sample_id\":" + std::to_string(r.sample_id) + ",\"clean_input\":";
  append_vector(out, r.clean_input);
  out += ",\"adv_input\":";
  append_vector(out, r.adv_input);
  out += ",\"clean_output\":";
  append_vector(out, r.clean_output);
  out += ",\"adv_output\":";
  append_vector(out, r.adv_output);
  out += ",\"truth\":" + std::to_string(r.truth);
  out += ",\"attack_success\":";
  out += r.attack_success ? "true" : "false";
  out += ",\"model_id\":" + json(r.model_id).dump();
  out += ",\"attack_id\":\"";
  out += attacks::to_string(r.attack_id);
  out += "\"}";
  return out;
}

PredictionRecord record_from_json_line(const std::string& line, std::size_t line_number) {
  try {
    const json doc = json::parse(line);
    if (!doc.is_object()) throw std::runtime_error("not a JSON object");
    PredictionRecord r;
    r.sample_id = doc.at("sample_id").get<std::size_t>();
    r.clean_input = vector_field(doc, "clean_input");
    r.adv_input = vector_field(doc, "adv_input");
    r.clean_output = vector_field(doc, "clean_output");
    r.adv_output = vector_field(doc, "adv_output");
    r.truth = doc.at("truth").get<std::size_t>();
    r.attack_success = doc.at("attack_success").get<bool>();
    r.model_id = doc.at("model_id").get<std::string>();
    r.attack_id = attacks::family_from_string(doc.at("attack_id").get<std::string>());
    if (r.clean_output.size() != r.adv_output.size() || r.clean_output.empty()) {
      throw std::runtime_error("clean_output and adv_output lengths differ or are empty");
    }
    if (r.truth >= r.clean_output.size()) throw std::runtime_error("truth label out of range");
    return r;
  } catch (const std::exception& e) {
    throw RecordParseError(line_number, e.what());
  }
}

void write_records_jsonl(std::ostream& out, const std::vector<PredictionRecord>& records) {
  for (const auto& r : records) out << record_to_json_line(r) << '\n';
}

std::vector<PredictionRecord> read_records_jsonl(std::istream& in) {
  std::vector<PredictionRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(record_from_json_line(line, line_number));
  }
  return records;
}

void save_records(const std::filesystem::path& path, const std::vector<PredictionRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_records_jsonl(out, records);
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<PredictionRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_records_jsonl(in);
}

void write_records_csv(std::ostream& out, const std::vector<PredictionRecord>& records) {
  const std::size_t classes = records.empty() ? 0 : records.front().clean_output.size();
  out << "sample_id,model_id,attack_id,truth,attack_success,clean_pred,adv_pred";
  for (std::size_t k = 0; k < classes; ++k) out << ",clean_p" << k;
  for (std::size_t k = 0; k < classes; ++k) out << ",adv_p" << k;
  out << '\n';
  for (const auto& r : records) {
    out << r.sample_id << ',' << r.model_id << ',' << attacks::to_string(r.attack_id) << ','
        << r.truth << ',' << (r.attack_success ? 1 : 0) << ',' << argmax(r.clean_output.view())
        << ',' << argmax(r.adv_output.view());
    for (double p : r.clean_output) out << ',' << format_double(p);
    for (double p : r.adv_output) out << ',' << format_double(p);
    out << '\n';
  }
}

}  // namespace advf::pipeline
