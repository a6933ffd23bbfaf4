#pragma once

#include <string>

#include <json.hpp>

#include "nagtrace/multihomog.hpp"
#include "nagtrace/trace.hpp"
#include "nagtrace/witness.hpp"

namespace nagtrace {

/// Input JSON does not match the expected layout or the system it is read against.
class SchemaError : public Error {
 public:
  using Error::Error;
};

using Json = nlohmann::json;

// Complex numbers are [re, im]; doubles are written shortest-round-trip so reading back is bit-exact.
Json to_json(Complex c);
Json to_json(const CVector& v);
Json to_json(const LinearForm& f);
Json to_json(const Slice& s);
Json to_json(const WitnessSet& w);
Json to_json(const WitnessCollection& c);
Json to_json(const TraceTestResult& r);
Json to_json(const Partition& p);
Json to_json(const MultiDegree& md);
Json to_json(const PairReport& p);
Json to_json(const MTraceReport& r);

Complex complex_from_json(const Json& j);
CVector vector_from_json(const Json& j, Eigen::Index expected_size = -1);
LinearForm form_from_json(const Json& j, const PolySystem& system);
Slice slice_from_json(const Json& j, const PolySystem& system);
WitnessSet witness_set_from_json(const Json& j, const PolySystem& system);
WitnessCollection collection_from_json(const Json& j, const PolySystem& system);

/// Parses text as JSON; malformed input becomes SchemaError.
Json parse_json(const std::string& text);

}  // namespace nagtrace
