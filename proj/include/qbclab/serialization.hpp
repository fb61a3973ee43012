#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "qbclab/channels.hpp"
#include "qbclab/regions.hpp"

namespace qbclab {

// JSON schema (all matrices row-major, complex entries as [re, im] pairs):
//   channel:  {"alphabet": N, "dims": [dB, dE], "outputs": [matrix, ...]}
//   compound: {"members": [channel, ...], "net": {"tau": t, "seed": s}?}
//   input:    {"l": l, "alphabet": NX, "q": [...], "r": [[...]], "t": [[...]]}
// Doubles survive a dump/parse round trip bit-exactly (shortest round-trip
// formatting); semantic errors carry the JSON path of the offending field.

nlohmann::json channel_to_json(const CqqBroadcastChannel& w);
CqqBroadcastChannel channel_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::json compound_to_json(const CompoundSet& set);
CompoundSet compound_from_json(const nlohmann::json& j);

nlohmann::json input_to_json(const FactorizedInput& input);
FactorizedInput input_from_json(const nlohmann::json& j);

// File helpers; parse failures and semantic failures both surface as
// validation_error with the file path (and parser line/column) up front.
CompoundSet load_compound(const std::string& path);
void save_compound(const CompoundSet& set, const std::string& path);
FactorizedInput load_input(const std::string& path);
void save_input(const FactorizedInput& input, const std::string& path);

// Sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const nlohmann::json& j);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& content);

// %.17g — enough digits to reproduce the double exactly.
std::string format_double(double x);

// Deterministic CSV assembly: fixed column count, '\n' line ends, %.17g
// numeric cells. Byte-identical output for identical inputs.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns);

    CsvWriter& num(double v);
    CsvWriter& integer(std::int64_t v);
    CsvWriter& text(const std::string& v);  // must not contain ',' or '\n'
    void end_row();

    const std::string& str() const;
    void write(const std::string& path) const;

  private:
    std::size_t columns_ = 0;
    std::size_t in_row_ = 0;
    std::string buf_;
};

}  // namespace qbclab
