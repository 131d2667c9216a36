#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "advf/attacks.hpp"
#include "advf/numcore.hpp"

namespace advf::pipeline {

/// One (model, attack, sample) outcome of a campaign.
struct PredictionRecord {
  std::size_t sample_id = 0;
  Vector clean_input;
  Vector adv_input;
  Vector clean_output;
  Vector adv_output;
  std::size_t truth = 0;
  bool attack_success = false;
  std::string model_id;
  attacks::Family attack_id = attacks::Family::FGSM;

  bool operator==(const PredictionRecord&) const = default;
};

/// Raised for a malformed record line; line() is 1-based.
class RecordParseError : public std::runtime_error {
 public:
  RecordParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Sort key used before persistence: (model_id, attack name, sample_id).
bool record_less(const PredictionRecord& a, const PredictionRecord& b);

/// One JSON object per line; floats printed with 17 significant digits.
std::string record_to_json_line(const PredictionRecord& r);
PredictionRecord record_from_json_line(const std::string& line, std::size_t line_number = 1);

void write_records_jsonl(std::ostream& out, const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> read_records_jsonl(std::istream& in);
void save_records(const std::filesystem::path& path, const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> load_records(const std::filesystem::path& path);

/// Flat export without the raw input vectors.
void write_records_csv(std::ostream& out, const std::vector<PredictionRecord>& records);

/// Shortest-free fixed format used by every artifact: %.17g.
std::string format_double(double value);

}  // namespace advf::pipeline
