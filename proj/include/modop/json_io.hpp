#pragma once

#include "json.hpp"

#include "modop/algebra.hpp"
#include "modop/module_space.hpp"
#include "modop/normality.hpp"
#include "modop/regular.hpp"
#include "modop/report.hpp"

namespace modop {

using Json = nlohmann::json;

// Algebra elements:  {"shape":[n1,...], "blocks":[ rows of [re,im] per block ]}
// Operators:         {"shape":[...], "rank":k, "entries": k×k grid of elements}
// Regular operators: operator JSON plus {"kind":"bounded_transform"}
// Parsing failures throw FormatError.

Json to_json(const AlgebraShape& s);
AlgebraShape shape_from_json(const Json& j);

Json to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

Json to_json(const AlgebraElement& a);
AlgebraElement element_from_json(const Json& j);

Json to_json(const OperatorMatrix& t);
OperatorMatrix operator_from_json(const Json& j);

Json to_json(const RegularOp& r);
/// Accepts a tagged bounded transform; throws FormatError on a different kind.
RegularOp regular_from_json(const Json& j);
bool is_bounded_transform(const Json& j);

Json to_json(const Residual& r);
Json to_json(const Report& r);
Json to_json(const UnitaryWitness& w);
Json to_json(const KaplanskyReport& k);

}  // namespace modop
