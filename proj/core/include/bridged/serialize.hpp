#ifndef BRIDGED_SERIALIZE_HPP
#define BRIDGED_SERIALIZE_HPP

#include <filesystem>
#include <string>

#include "bridged/bridge.hpp"
#include "bridged/clustering.hpp"
#include "bridged/metrics.hpp"
#include "bridged/synth.hpp"

namespace bridged {

// JSON text for the artifacts that cross process boundaries. Reals use the
// shortest representation that reads back bit-exact.

std::string to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const std::string& text);

/// {"method", "forward", "inverse", "counts"}; unresolved entries are null.
std::string to_json(const Bridge& bridge);
Bridge bridge_from_json(const std::string& text);

std::string to_json(const VoteMatrix& votes);

/// Either the explicit form {"priors", "mu_x", "mu_y", "sigma" | "sigma_x",
/// "sigma_y"} or a generator request {"clusters", "x_dim", "y_dim",
/// "delta_over_sigma"} resolved with `seed`.
std::string to_json(const MixtureSpec& spec);
MixtureSpec mixture_spec_from_json(const std::string& text, RngSeed seed = {});

std::string to_json(const MetricsReport& report);
std::string to_json(const BoundReport& report);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace bridged

#endif  // BRIDGED_SERIALIZE_HPP
