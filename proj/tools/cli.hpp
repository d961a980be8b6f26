#ifndef QUNFOLD_TOOLS_CLI_HPP
#define QUNFOLD_TOOLS_CLI_HPP

#include <ostream>

namespace qunfold::cli {

/// Runs one subcommand. Output paths given as "-" go to `out`, messages to
/// `err`. Returns 0 on success, 1 on a domain error, 2 on a usage error.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qunfold::cli

#endif
