#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "rfem/space.hpp"

namespace rfem {

/// Mesh grammar shared by every subcommand: "square:NX,NY" or
/// "interval:N[,LENGTH]".
std::shared_ptr<const Plex> parse_mesh_spec(const std::string& spec);

/// Named coordinate expressions accepted by --expr / --check.
ScalarExpr parse_expr(const std::string& name);

/// Dispatches the rfem command line.  Returns 0 on success, 1 on a usage
/// error, 2 on a numerical failure; warnings go to stderr and never change
/// the exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rfem
