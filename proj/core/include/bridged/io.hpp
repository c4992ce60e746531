#ifndef BRIDGED_IO_HPP
#define BRIDGED_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>

#include "bridged/types.hpp"

namespace bridged {

enum class FileFormat { csv, jsonl };

/// csv for ".csv", jsonl for ".jsonl"/".json"; anything else is an ArgumentError.
FileFormat format_from_path(const std::filesystem::path& path);

/// CSV: a header row, then one record per line. Columns named `id` and
/// `latent` are special; every other column is a feature in header order.
/// JSONL: one object per line, {"id": ..., "latent": ..., "features": [...]}.
///
/// Rows keep file order. Ids fall back to the row index.
PointSet load_pointset(const std::filesystem::path& path, FileFormat format);
PointSet load_pointset(const std::filesystem::path& path);

PointSet read_pointset_csv(std::istream& in, const std::string& source = "<stream>");
PointSet read_pointset_jsonl(std::istream& in, const std::string& source = "<stream>");

/// Writes header `id,f0..f{d-1}[,latent]`.
void write_pointset_csv(std::ostream& out, const PointSet& set);
void write_pointset_jsonl(std::ostream& out, const PointSet& set);
void save_pointset(const std::filesystem::path& path, const PointSet& set);

/// Shortest decimal text that round-trips (at least 15 significant digits).
std::string format_real(double value);

}  // namespace bridged

#endif  // BRIDGED_IO_HPP
