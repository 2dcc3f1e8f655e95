#pragma once

#include <string>

#include "xprov/lineage.hpp"

namespace xprov {

// Record-list text form: header "out_<dim0>,...,in_slot,in_<dim0>,...,kind",
// one record per line in canonical order, RFC4180-style quoting for fields
// containing commas, quotes, or newlines. Requires uniform input arity
// across slots (captured tables are single-slot). Schemas and table
// metadata are not part of this format; the parser takes them explicitly.
std::string lineage_to_csv(const LineageTable& table);

LineageTable lineage_from_csv(const std::string& text,
                              std::vector<ContainerSchema> input_schemas,
                              ContainerSchema output_schema,
                              Completeness direct_completeness,
                              Completeness indirect_completeness,
                              Origin origin);

// Self-contained compressed form: the "XPLT1" magic line followed by a JSON
// body holding schemas, completeness, origin, and the record set encoded as
// maximal axis-aligned rectangles (per kind, per slot) of label intervals.
// decompress(compress(t)) reproduces records, completeness, and origin
// exactly. Tampered payloads raise CorruptPayload.
std::string compress_table(const LineageTable& table);
LineageTable decompress_table(const std::string& payload);

}  // namespace xprov
