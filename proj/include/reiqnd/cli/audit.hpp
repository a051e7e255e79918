#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "reiqnd/params.hpp"

namespace reiqnd::cli {

enum class Verdict { match, flagged };

std::string to_string(Verdict verdict);

/// How a recomputed number is held against a quoted one.
///  relative:   |c - q| / |q| <= threshold
///  complement: same on 1 - c vs 1 - q, for probabilities near one
///  upper_bound: c <= q, for quotes stated as "at most"
/// relative and complement also accept |c - q| within half a unit of the
/// quote's last digit.
enum class Comparison { relative, complement, upper_bound };

struct AuditEntry {
  std::string preset;
  std::string quantity;  // name with unit suffix, e.g. cavity_linewidth_hz
  double paper_value = 0.0;
  double computed_value = 0.0;
  double relative_difference = 0.0;  // as used by the comparison
  Comparison comparison = Comparison::relative;
  double threshold = 0.0;
  double quote_half_unit = 0.0;
  Verdict verdict = Verdict::match;
};

struct AuditReport {
  std::vector<AuditEntry> entries;

  std::vector<const AuditEntry*> flagged() const;
};

struct AuditSettings {
  double alpha = 2.0;
  double p_det = 0.9;
  int n_m = 2;
};

/// Recomputes every quantitatively quoted number of the Nd:YVO4 case study
/// from the embedded presets. Fidelities use a 10% threshold, everything
/// else 2%.
AuditReport run_audit(const AuditSettings& settings = {});

/// Entries for the quoted parameter-chain values (field, linewidth, coupling,
/// cooperativity, Purcell factor) that belong to a cavity with this quality
/// factor. Only Q = 20,000 and Q = 300,000 have quotes; other cavities yield
/// no entries. The single-photon field is quoted once and is included only
/// when `include_field` is set.
std::vector<AuditEntry> audit_parameter_chain(const std::string& preset, const CavitySpec& cavity,
                                              const DerivedParams& derived, bool include_field);

Verdict judge(double computed, double quoted, Comparison comparison, double threshold,
              double quote_half_unit, double* relative_difference = nullptr);

nlohmann::ordered_json to_json(const AuditReport& report);
std::string to_csv(const AuditReport& report);

}  // namespace reiqnd::cli
