#include "bridged/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include <fmt/format.h>
#include <json.hpp>

namespace bridged {

namespace {

using nlohmann::json;

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view text, double& value) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    return ec == std::errc() && ptr == end;
}

bool parse_int(std::string_view text, int& value) {
    text = trim(text);
    if (text.empty()) return false;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec == std::errc() && ptr == end) return true;
    // Accept integral reals such as "2.0".
    double d = 0.0;
    if (!parse_double(text, d) || d != static_cast<double>(static_cast<int>(d))) return false;
    value = static_cast<int>(d);
    return true;
}

Matrix to_matrix(const std::vector<double>& flat, std::size_t rows, std::size_t cols) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flat[i * cols + j];
        }
    }
    return m;
}

}  // namespace

FileFormat format_from_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return FileFormat::csv;
    if (ext == ".jsonl" || ext == ".json") return FileFormat::jsonl;
    throw ArgumentError(fmt::format("cannot infer format of '{}'", path.string()));
}

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

PointSet read_pointset_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw ParseError(fmt::format("{}: missing CSV header", source));

    const auto header = split_fields(line);
    int id_col = -1;
    int latent_col = -1;
    std::vector<int> feature_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto name = trim(header[c]);
        if (name == "id") {
            id_col = static_cast<int>(c);
        } else if (name == "latent") {
            latent_col = static_cast<int>(c);
        } else {
            feature_cols.push_back(static_cast<int>(c));
        }
    }
    if (feature_cols.empty()) {
        throw DimensionError(fmt::format("{}:{}: header has no feature columns", source, line_no));
    }

    std::vector<double> flat;
    std::vector<std::string> ids;
    Labels latent;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw DimensionError(fmt::format("{}:{}: expected {} fields, found {}", source,
                                             line_no, header.size(), fields.size()));
        }
        for (int c : feature_cols) {
            double v = 0.0;
            if (!parse_double(fields[static_cast<std::size_t>(c)], v)) {
                throw ParseError(fmt::format("{}:{}: '{}' is not a number", source, line_no,
                                             trim(fields[static_cast<std::size_t>(c)])));
            }
            flat.push_back(v);
        }
        if (id_col >= 0) ids.emplace_back(trim(fields[static_cast<std::size_t>(id_col)]));
        if (latent_col >= 0) {
            int l = 0;
            if (!parse_int(fields[static_cast<std::size_t>(latent_col)], l)) {
                throw ParseError(fmt::format("{}:{}: latent '{}' is not an integer", source,
                                             line_no, trim(fields[static_cast<std::size_t>(latent_col)])));
            }
            latent.push_back(l);
        }
        ++rows;
    }
    std::optional<Labels> lat;
    if (latent_col >= 0) lat = std::move(latent);
    return PointSet(to_matrix(flat, rows, feature_cols.size()), std::move(ids), std::move(lat));
}

PointSet read_pointset_jsonl(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> flat;
    std::vector<std::string> ids;
    Labels latent;
    std::size_t rows = 0;
    std::size_t dim = 0;
    bool any_id = false;
    bool any_latent = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(fmt::format("{}:{}: {}", source, line_no, e.what()));
        }
        if (!rec.is_object() || !rec.contains("features") || !rec["features"].is_array()) {
            throw ParseError(fmt::format("{}:{}: record needs a 'features' array", source, line_no));
        }
        const auto& feats = rec["features"];
        if (rows == 0) dim = feats.size();
        if (feats.size() != dim || dim == 0) {
            throw DimensionError(fmt::format("{}:{}: expected {} features, found {}", source,
                                             line_no, dim, feats.size()));
        }
        for (const auto& v : feats) {
            if (!v.is_number()) {
                throw ParseError(fmt::format("{}:{}: non-numeric feature", source, line_no));
            }
            flat.push_back(v.get<double>());
        }
        const bool has_id = rec.contains("id");
        const bool has_latent = rec.contains("latent");
        if (rows == 0) {
            any_id = has_id;
            any_latent = has_latent;
        } else if (has_id != any_id || has_latent != any_latent) {
            throw ParseError(fmt::format("{}:{}: inconsistent optional fields", source, line_no));
        }
        if (has_id) {
            const auto& id = rec["id"];
            ids.push_back(id.is_string() ? id.get<std::string>() : id.dump());
        }
        if (has_latent) {
            const auto& l = rec["latent"];
            if (!l.is_number_integer()) {
                throw ParseError(fmt::format("{}:{}: latent is not an integer", source, line_no));
            }
            latent.push_back(l.get<int>());
        }
        ++rows;
    }
    if (rows == 0) throw ParseError(fmt::format("{}: no records", source));
    std::optional<Labels> lat;
    if (any_latent) lat = std::move(latent);
    return PointSet(to_matrix(flat, rows, dim), std::move(ids), std::move(lat));
}

PointSet load_pointset(const std::filesystem::path& path, FileFormat format) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
    return format == FileFormat::csv ? read_pointset_csv(in, path.string())
                                     : read_pointset_jsonl(in, path.string());
}

PointSet load_pointset(const std::filesystem::path& path) {
    return load_pointset(path, format_from_path(path));
}

void write_pointset_csv(std::ostream& out, const PointSet& set) {
    out << "id";
    for (int j = 0; j < set.dim(); ++j) out << ",f" << j;
    if (set.has_latent()) out << ",latent";
    out << '\n';
    for (std::size_t i = 0; i < set.size(); ++i) {
        out << set.id(i);
        for (int j = 0; j < set.dim(); ++j) out << ',' << format_real(set.points()(static_cast<Eigen::Index>(i), j));
        if (set.has_latent()) out << ',' << set.latent()[i];
        out << '\n';
    }
}

void write_pointset_jsonl(std::ostream& out, const PointSet& set) {
    for (std::size_t i = 0; i < set.size(); ++i) {
        out << "{\"id\":" << json(set.id(i)).dump() << ",\"features\":[";
        for (int j = 0; j < set.dim(); ++j) {
            if (j) out << ',';
            out << format_real(set.points()(static_cast<Eigen::Index>(i), j));
        }
        out << ']';
        if (set.has_latent()) out << ",\"latent\":" << set.latent()[i];
        out << "}\n";
    }
}

void save_pointset(const std::filesystem::path& path, const PointSet& set) {
    std::ofstream out(path);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    if (format_from_path(path) == FileFormat::csv) {
        write_pointset_csv(out, set);
    } else {
        write_pointset_jsonl(out, set);
    }
}

}  // namespace bridged
