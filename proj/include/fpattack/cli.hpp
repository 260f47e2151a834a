#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpattack {

struct BundledSpec {
    std::string_view id;
    std::string_view text;
};

/// Desk-scale experiment specs shipped with the binary, one per reproduce target.
const std::vector<BundledSpec>& bundled_specs();
std::optional<std::string_view> bundled_spec(std::string_view id);

/// Exit codes: 0 success, 1 validation/configuration error, 2 I/O error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fpattack
