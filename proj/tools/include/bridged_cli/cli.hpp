#ifndef BRIDGED_CLI_HPP
#define BRIDGED_CLI_HPP

#include <iosfwd>

namespace bridged {

/// Entry point of the `bridged` tool. Returns 0 on success, 2 on usage
/// errors (unknown flags, missing or unreadable config), 1 otherwise.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bridged

#endif  // BRIDGED_CLI_HPP
