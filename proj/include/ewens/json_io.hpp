#pragma once

#include "ewens/field.hpp"
#include "ewens/partition.hpp"
#include "ewens/tree.hpp"
#include "ewens/verify.hpp"

#include <json.hpp>

// ADL serializers so nlohmann::json converts the library types directly:
//   nlohmann::json j = region;  auto r = j.get<TreeRegion>();
// Data shapes (addresses, regions, configurations, field tables, samples)
// round-trip; reports serialize one way.

namespace ewens {

NLOHMANN_JSON_SERIALIZE_ENUM(FieldMode, {
                                            {FieldMode::finite_alphabet, "finite_alphabet"},
                                            {FieldMode::explicit_tail, "explicit_tail"},
                                        })

NLOHMANN_JSON_SERIALIZE_ENUM(Verdict, {
                                          {Verdict::consistent, "consistent"},
                                          {Verdict::inconsistent, "inconsistent"},
                                          {Verdict::unresolved, "unresolved"},
                                      })

NLOHMANN_JSON_SERIALIZE_ENUM(ZConvention, {
                                              {ZConvention::enumeration, "enumeration"},
                                              {ZConvention::esf_closed_form, "esf_closed_form"},
                                          })

NLOHMANN_JSON_SERIALIZE_ENUM(VerifyLevel, {
                                              {VerifyLevel::quick, "quick"},
                                              {VerifyLevel::full, "full"},
                                          })

// Exact rationals travel as "p/q" strings; a bare integer is also accepted
// on input, as is a decimal string.
Rational rational_from_json(const nlohmann::json& j);
nlohmann::json rational_to_json(const Rational& value);

void to_json(nlohmann::json& j, const ScalarValue& value);
void from_json(const nlohmann::json& j, ScalarValue& value);

void to_json(nlohmann::json& j, const TreeAddress& address);
void from_json(const nlohmann::json& j, TreeAddress& address);

void to_json(nlohmann::json& j, const TreeRegion& region);
void from_json(const nlohmann::json& j, TreeRegion& region);

void to_json(nlohmann::json& j, const SpinConfiguration& sigma);
void from_json(const nlohmann::json& j, SpinConfiguration& sigma);

void to_json(nlohmann::json& j, const GrowthStep& step);
void from_json(const nlohmann::json& j, GrowthStep& step);

void to_json(nlohmann::json& j, const FieldTable& table);
void from_json(const nlohmann::json& j, FieldTable& table);

void to_json(nlohmann::json& j, const AlleleCounts& counts);
AlleleCounts allele_counts_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const CrpSample& sample);

void to_json(nlohmann::json& j, const ConsistencyReport& report);
void to_json(nlohmann::json& j, const SummabilityReport& report);
void to_json(nlohmann::json& j, const VerificationReport& report);

}  // namespace ewens
