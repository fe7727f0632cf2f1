#include "rfem/diagnostics.hpp"

#include <cstdio>

namespace rfem {

const char* warning_name(Warning w) {
  switch (w) {
    case Warning::unknown_subdomain: return "unknown subdomain";
    case Warning::restrict_everything: return "restricting everything";
    case Warning::bc_outside_restriction: return "bc outside restriction";
    case Warning::nev_clamped: return "nev clamped";
  }
  return "unknown warning";
}

void emit_warning(Warning w, const std::string& detail) {
  std::fprintf(stderr, "WARN: %s: %s\n", warning_name(w), detail.c_str());
}

}  // namespace rfem
