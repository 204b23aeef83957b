#pragma once

#include <filesystem>
#include <iosfwd>

#include "cmcausal/sample.hpp"

namespace cmcausal {

enum class HeaderMode {
  detect,  // skip the first line if it does not parse as two numbers
  present,
  absent,
};

/// Two comma-separated numeric columns, '.' decimal separator. Errors name
/// the offending line (1-based) and are thrown as InputError.
BivariateSample read_sample_csv(std::istream& in, HeaderMode header = HeaderMode::detect);
BivariateSample read_sample_csv(const std::filesystem::path& path, HeaderMode header = HeaderMode::detect);

/// Writes "x,y" followed by one row per observation at round-trip precision.
void write_sample_csv(std::ostream& out, const BivariateSample& sample);
void write_sample_csv(const std::filesystem::path& path, const BivariateSample& sample);

}  // namespace cmcausal
