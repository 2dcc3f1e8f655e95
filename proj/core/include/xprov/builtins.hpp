#pragma once

#include <string>
#include <vector>

#include "xprov/container.hpp"
#include "xprov/lineage.hpp"
#include "xprov/op_signature.hpp"

namespace xprov {

// Built-in table operations. All of them take exactly one 2-D container
// (dimension 0 = rows, dimension 1 = columns):
//
//   dropna                                  drop rows containing a Null
//   filter(column,cmp,value)                keep rows where the predicate
//                                           holds; cmp is one of < > = !=
//                                           and Null or mixed-type cells
//                                           never satisfy it
//   minmax_scale(columns)                   per column: (v-min)/(max-min)
//                                           over its numeric cells; a
//                                           constant column scales to 0.0;
//                                           non-numeric cells pass through
//   map_add_constant(k)                     add k to every numeric cell
//   sort(column,asc)                        stable sort by one column with
//                                           Nulls last; rows get fresh
//                                           positional labels "0".."n-1"
//   project(columns)                        keep the listed columns in the
//                                           listed order
//
// Multi-label parameters (columns) are comma-joined strings. Longhand
// names (drop_null_rows, filter_rows, minmax_scale_columns, sort_by_column,
// project_columns) are accepted as aliases.

// True when `op_name` (or an alias of it) names a built-in.
bool is_builtin(const std::string& op_name);

// Canonical short names of all built-ins.
std::vector<std::string> builtin_names();

Container execute_builtin(const OperationSignature& op,
                          const std::vector<Container>& inputs,
                          const std::string& output_id);

// Derives the exact cell-level influence table of one built-in application
// analytically (probing value-dependent cases such as filter predicates,
// scaling pools, and sort ties without rerunning the whole operation).
// Verifies that `output` matches what execute_builtin produces for these
// inputs and fails with OutputMismatch otherwise; fails with NotBuiltin for
// unknown operations. Both kinds come back Exact.
LineageTable capture_exact_lineage(const OperationSignature& op,
                                   const std::vector<Container>& inputs,
                                   const Container& output);

}  // namespace xprov
