#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "surfcert/certificate.hpp"
#include "surfcert/fatgraph.hpp"
#include "surfcert/splitting.hpp"
#include "surfcert/stallings.hpp"

namespace surfcert {

// JSON formats. Graphs: {"vertices":[ids], "edges":[{"id","src","dst","label"}],
// "basepoint":id}. Half-edge 2*id leaves src, 2*id+1 leaves dst. Fatgraphs add
// "cyclic_orders":{vertex id:[half-edge ids]}. Other files carry a "format"
// tag. Parsers throw Error(Parse).
inline constexpr std::string_view kPieceFormat = "surfcert-piece/1";
inline constexpr std::string_view kSpecFormat = "surfcert-spec/1";
inline constexpr std::string_view kChainFormat = "surfcert-chain/1";
inline constexpr std::string_view kCertificateFormat = "surfcert-certificate/1";

std::string graph_to_json(const CoreGraph& g);
CoreGraph graph_from_json(std::string_view text);

std::string fatgraph_to_json(const Fatgraph& y);
Fatgraph fatgraph_from_json(std::string_view text);

std::string piece_to_json(const SurfacePiece& piece);
SurfacePiece piece_from_json(std::string_view text);

std::string spec_to_json(const GraphOfGroupsSpec& spec);
GraphOfGroupsSpec spec_from_json(std::string_view text);

struct ChainFile {
  int rank = 2;
  std::vector<CyclicWord> words;
};
std::string chain_to_json(const ChainFile& chain);
ChainFile chain_from_json(std::string_view text);

std::string certificate_to_json(const ClosedSurfaceCertificate& cert);
ClosedSurfaceCertificate certificate_from_json(std::string_view text);
std::string checklist_to_json(const std::vector<CheckItem>& items);

// Throw Error(Io).
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

}  // namespace surfcert
