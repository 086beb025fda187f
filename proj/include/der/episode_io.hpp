#ifndef DER_EPISODE_IO_HPP_
#define DER_EPISODE_IO_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "der/types.hpp"

namespace der {

// Line format, one transition per line, space separated:
//   s[0..12] a[0..5] s_next[0..12] r done success
// Floats are written as C99 hex literals so round trips are bit exact.
// A blank line terminates an episode; a file may hold several episodes.

void write_episode(std::ostream& out, const Episode& e);
Episode read_episode(std::istream& in);

void save_episodes(const std::string& path, const std::vector<Episode>& eps);
std::vector<Episode> load_episodes(const std::string& path);

}  // namespace der

#endif  // DER_EPISODE_IO_HPP_
