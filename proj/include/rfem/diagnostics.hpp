#pragma once

#include <string>

namespace rfem {

/// Non-fatal conditions a caller may want to assert on.  Objects that can
/// trigger one carry the flag alongside the stderr message.
enum class Warning {
  unknown_subdomain,        // a boundary set names a label the mesh lacks
  restrict_everything,      // restriction removed every degree of freedom
  bc_outside_restriction,   // bc subdomain missing from the boundary set
  nev_clamped,              // more eigenpairs requested than the space holds
};

const char* warning_name(Warning w);

/// Prints "WARN: <name>: <detail>" on stderr.  Stdout stays machine-readable.
void emit_warning(Warning w, const std::string& detail);

}  // namespace rfem
