#pragma once

#include "tqnn/classifier.hpp"
#include "tqnn/statesum.hpp"

#include <nlohmann/json_fwd.hpp>
#include <string>

namespace tqnn {

/// Malformed input file; the message carries the offending JSON path.
struct SchemaError : Error {
    using Error::Error;
};

using json = nlohmann::json;

GroupSpec group_from_json(const json& obj, const std::string& path);
json group_to_json(const GroupSpec& g);

SpinNetwork spin_network_from_json(const json& obj, const std::string& path);
json spin_network_to_json(const SpinNetwork& sn);

TwoComplex complex_from_json(const json& obj, const std::string& path);
json complex_to_json(const TwoComplex& c);

LabeledDataset dataset_from_json(const json& obj, const std::string& path);
json dataset_to_json(const LabeledDataset& ds);

json amplitude_to_json(const Amplitude& a);

json load_json_file(const std::string& filename);
void write_json_file(const std::string& filename, const json& value);

/// Shortest round-trip decimal for doubles; stable across runs.
std::string format_double(double v);

void write_csv_file(const std::string& filename, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

} // namespace tqnn
