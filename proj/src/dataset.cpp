#include <fstream>
#include <istream>
#include <iterator>

#include <spdlog/spdlog.h>

#include "tweetattack/errors.hpp"
#include "tweetattack/harness.hpp"

namespace tweetattack::harness {

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t quote_line = 0;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    // a bare newline (blank line) is not a record
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          quoted = true;
          quote_line = line;
        } else {
          field.push_back(c);  // stray quote inside an unquoted field
        }
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < data.size() && data[i + 1] == '\n') break;
        end_row();
        ++line;
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw MalformedCsv("unterminated quoted field starting on line " + std::to_string(quote_line));
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

Dataset load_dataset(std::istream& in, const preprocess::PreprocessConfig* cfg) {
  auto rows = parse_csv(in);
  if (rows.empty()) throw MissingColumn("CSV has no header row");
  const auto& header = rows.front();
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (text::trim(header[i]) == name) return i;
    return std::nullopt;
  };
  const auto text_col = column("text");
  const auto label_col = column("sentiment");
  if (!text_col) throw MissingColumn("CSV header lacks a 'text' column");
  if (!label_col) throw MissingColumn("CSV header lacks a 'sentiment' column");
  const auto id_col = column("textID");

  Dataset ds;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ++ds.stats.rows;
    if (row.size() != header.size())
      throw MalformedCsv("record " + std::to_string(r) + " has " + std::to_string(row.size()) + " fields, header has " +
                         std::to_string(header.size()));
    const std::string& raw = row[*text_col];
    if (text::trim(raw).empty()) {
      ++ds.stats.skipped_empty_text;
      spdlog::debug("record {}: empty text, skipped", r);
      continue;
    }
    const auto label = parse_sentiment(text::trim(row[*label_col]));
    if (!label) {
      ++ds.stats.skipped_unknown_label;
      spdlog::debug("record {}: unknown sentiment '{}', skipped", r, row[*label_col]);
      continue;
    }
    Document doc;
    doc.id = id_col ? row[*id_col] : std::to_string(r);
    doc.raw_text = raw;
    doc.preprocessed_text = cfg ? preprocess::preprocess(raw, *cfg) : text::trim(raw);
    doc.gold_label = *label;
    ds.documents.push_back(std::move(doc));
  }
  if (ds.stats.skipped() > 0)
    spdlog::info("loaded {} documents, skipped {} ({} empty text, {} unknown sentiment)", ds.documents.size(),
                 ds.stats.skipped(), ds.stats.skipped_empty_text, ds.stats.skipped_unknown_label);
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const preprocess::PreprocessConfig* cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open dataset " + path.string());
  return load_dataset(in, cfg);
}

}  // namespace tweetattack::harness
