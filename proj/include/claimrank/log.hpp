#pragma once

#include <functional>
#include <string>

namespace claimrank {

// Non-fatal diagnostics. Default sink writes "warning: ..." to stderr.
using WarningSink = std::function<void(const std::string&)>;

void warn(const std::string& message);

// Replaces the sink and returns the previous one. An empty sink silences
// warnings.
WarningSink set_warning_sink(WarningSink sink);

}  // namespace claimrank
