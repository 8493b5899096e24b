#pragma once

#include <string>
#include <utility>
#include <vector>

#include "limitlab/marked_group.hpp"

namespace limitlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNegative = 3;
inline constexpr int kExitFailure = 4;

/// Parses argv, runs one subcommand, writes its artifacts and manifest, and
/// returns the process exit status.
int run(int argc, const char* const* argv);

/// "genus2", "schottky" (uses `lambda`) or a presentation JSON path.
MarkedGroup resolve_group(const std::string& source, double lambda);

/// whole | <character>-kernel | xi | xiA | xiB | <character>:<columns> |
/// cyclic(<word>) | words(<word>,<word>,...)
/// Columns are comma-separated integers, one column per ';'.
SubgroupSpec parse_spec(const MarkedGroup& group, const std::string& text);

/// fix(<word>) | repel(<word>) | spiral(<loops>) | angle(<radians>) | real(<x>)
BoundaryPoint<Precise> parse_target(const MarkedGroup& group, const std::string& text);

/// Flat "key = value" lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

}  // namespace limitlab::cli
