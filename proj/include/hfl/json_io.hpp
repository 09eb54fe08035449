#pragma once

#include <json.hpp>
#include <string>

#include "hfl/affine.hpp"
#include "hfl/graph.hpp"
#include "hfl/group.hpp"
#include "hfl/spectral.hpp"

namespace hfl {

using json = nlohmann::json;

/// {"type":"free","m":2} or {"type":"finite","order":n,"table":[[...]],"generators":[...]}
GroupContext group_from_json(const json& j);
json group_to_json(const GroupContext& ctx);

/// {"dim":d,"C":c,"sigma":s,"generators":{"g0":{"A":[[row-major]],"b":[...]}}}
/// Inverse-generator data is always derived, never read.
AffineAction action_from_json(const json& j, const GroupContext& ctx);

/// plain text edge list, one "u v" pair per line, 0-indexed
Graph graph_from_edge_list(const std::string& text);
std::string graph_to_edge_list(const Graph& g);

/// {"edges":[["s","t",w],...]}
LinkWeights weights_from_json(const json& j);

/// presentation emitted by relator extraction: {"type":"free","m":m,"relators":[...]}
json presentation_to_json(const GroupContext& fm, const std::vector<Element>& relators);
std::vector<Element> relators_from_json(const json& j, const GroupContext& fm);

json measure_to_json(const GroupContext& ctx, const WalkMeasure& mu);

json load_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace hfl
