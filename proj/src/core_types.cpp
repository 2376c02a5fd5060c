#include "magenta/core_types.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include <json.hpp>

namespace magenta {

namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

double parse_real(std::string_view field, std::size_t row) {
    double value = 0.0;
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError("invalid real '" + std::string(field) + "'", row);
    }
    return value;
}

long long parse_integer(std::string_view field, std::size_t row) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError("invalid integer '" + std::string(field) + "'", row);
    }
    return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

std::string cell_name(long long t, std::size_t c) {
    return "(t=" + std::to_string(t) + ", c=" + std::to_string(c) + ")";
}

bool near(double value, double target) { return std::abs(value - target) <= kActivityTolerance; }

std::vector<std::string> default_class_names(std::size_t num_classes) {
    std::vector<std::string> names;
    names.reserve(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) names.push_back("class_" + std::to_string(c));
    return names;
}

Dataset load_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::string line;
    std::size_t row = 0;

    static constexpr std::string_view kHeader[] = {"t", "c", "tx", "ty", "tz", "px", "py", "pz"};
    bool have_header = false;

    struct Cell {
        Vec3 target;
        Vec3 prediction;
    };
    std::map<long long, std::map<long long, Cell>> cells;
    long long max_class = -1;

    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (!have_header) {
            if (fields.size() != std::size(kHeader) || !std::equal(fields.begin(), fields.end(), std::begin(kHeader))) {
                throw ParseError("expected header 't,c,tx,ty,tz,px,py,pz'", row);
            }
            have_header = true;
            continue;
        }
        if (fields.size() != std::size(kHeader)) {
            throw ParseError("expected 8 fields, got " + std::to_string(fields.size()), row);
        }
        const long long t = parse_integer(fields[0], row);
        const long long c = parse_integer(fields[1], row);
        if (c < 0) throw ParseError("negative class index", row);
        Cell cell{{parse_real(fields[2], row), parse_real(fields[3], row), parse_real(fields[4], row)},
                  {parse_real(fields[5], row), parse_real(fields[6], row), parse_real(fields[7], row)}};
        if (!cells[t].emplace(c, cell).second) {
            throw ParseError("duplicate entry for " + cell_name(t, static_cast<std::size_t>(c)), row);
        }
        max_class = std::max(max_class, c);
    }
    if (!have_header) throw ParseError("missing header", row);
    if (cells.empty()) throw ValidationError("'" + path.string() + "' contains no frames");

    const auto num_classes = static_cast<std::size_t>(max_class + 1);
    Dataset dataset;
    dataset.class_names = default_class_names(num_classes);
    dataset.frames.reserve(cells.size());
    for (const auto& [t, row_cells] : cells) {
        AccdoaFrame frame;
        frame.frame_index = t;
        frame.targets.resize(num_classes);
        frame.predictions.resize(num_classes);
        for (std::size_t c = 0; c < num_classes; ++c) {
            const auto it = row_cells.find(static_cast<long long>(c));
            if (it == row_cells.end()) throw ValidationError("missing dense entry for " + cell_name(t, c));
            frame.targets[c] = it->second.target;
            frame.predictions[c] = it->second.prediction;
        }
        dataset.frames.push_back(std::move(frame));
    }
    return dataset;
}

std::vector<Vec3> parse_vec_array(const json& value, std::size_t row, const char* key) {
    if (!value.is_array()) throw ParseError(std::string("'") + key + "' must be an array", row);
    std::vector<Vec3> out;
    out.reserve(value.size());
    for (const auto& item : value) {
        if (!item.is_array() || item.size() != 3) {
            throw ParseError(std::string("'") + key + "' entries must be [x,y,z]", row);
        }
        Vec3 v;
        for (std::size_t i = 0; i < 3; ++i) {
            if (!item[i].is_number()) throw ParseError(std::string("non-numeric component in '") + key + "'", row);
            v[i] = item[i].get<double>();
        }
        out.push_back(v);
    }
    return out;
}

Dataset load_jsonl(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::string line;
    std::size_t row = 0;
    std::map<long long, AccdoaFrame> frames;
    std::size_t num_classes = 0;

    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), row);
        }
        if (!obj.is_object() || !obj.contains("t") || !obj.contains("targets") || !obj.contains("predictions")) {
            throw ParseError("expected object with keys t, targets, predictions", row);
        }
        if (!obj["t"].is_number_integer()) throw ParseError("'t' must be an integer", row);
        AccdoaFrame frame;
        frame.frame_index = obj["t"].get<long long>();
        frame.targets = parse_vec_array(obj["targets"], row, "targets");
        frame.predictions = parse_vec_array(obj["predictions"], row, "predictions");
        if (frame.targets.empty()) throw ParseError("frame has no classes", row);
        if (frame.targets.size() != frame.predictions.size()) {
            throw ParseError("targets and predictions differ in length", row);
        }
        if (num_classes == 0) num_classes = frame.targets.size();
        if (frame.targets.size() != num_classes) {
            throw ParseError("expected " + std::to_string(num_classes) + " classes", row);
        }
        const long long t = frame.frame_index;
        if (!frames.emplace(t, std::move(frame)).second) {
            throw ParseError("duplicate frame t=" + std::to_string(t), row);
        }
    }
    if (frames.empty()) throw ValidationError("'" + path.string() + "' contains no frames");

    Dataset dataset;
    dataset.class_names = default_class_names(num_classes);
    dataset.frames.reserve(frames.size());
    for (auto& [t, frame] : frames) dataset.frames.push_back(std::move(frame));
    return dataset;
}

}  // namespace

std::string format_real(double value) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(n));
}

FrameLayout layout_from_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".ndjson") return FrameLayout::jsonl;
    return FrameLayout::csv;
}

void validate_and_count(Dataset& dataset) {
    if (dataset.frames.empty()) throw ValidationError("dataset has no frames (T >= 1 required)");
    const std::size_t num_classes = dataset.frames.front().targets.size();
    if (num_classes == 0) throw ValidationError("dataset has no classes (C >= 1 required)");
    if (dataset.class_names.empty()) dataset.class_names = default_class_names(num_classes);
    if (dataset.class_names.size() != num_classes) {
        throw ValidationError("class name list has " + std::to_string(dataset.class_names.size()) +
                              " entries, frames have " + std::to_string(num_classes) + " classes");
    }

    std::vector<long long> counts(num_classes, 0);
    for (const auto& frame : dataset.frames) {
        if (frame.targets.size() != num_classes || frame.predictions.size() != num_classes) {
            throw ValidationError("frame t=" + std::to_string(frame.frame_index) + " has inconsistent class count");
        }
        for (std::size_t c = 0; c < num_classes; ++c) {
            const Vec3& target = frame.targets[c];
            const Vec3& pred = frame.predictions[c];
            for (std::size_t i = 0; i < 3; ++i) {
                if (!std::isfinite(target[i]) || !std::isfinite(pred[i])) {
                    throw ValidationError("non-finite value at " + cell_name(frame.frame_index, c));
                }
            }
            const double n = norm(target);
            if (near(n, 1.0)) {
                ++counts[c];
            } else if (!near(n, 0.0)) {
                throw ValidationError("target norm " + format_real(n) + " is neither 0 nor 1 at " +
                                      cell_name(frame.frame_index, c));
            }
        }
    }
    dataset.frame_counts = std::move(counts);
}

Dataset load_frames(const std::filesystem::path& path, FrameLayout layout) {
    Dataset dataset = layout == FrameLayout::csv ? load_csv(path) : load_jsonl(path);
    validate_and_count(dataset);
    return dataset;
}

void save_frames(const Dataset& dataset, const std::filesystem::path& path, FrameLayout layout) {
    auto out = open_output(path);
    if (layout == FrameLayout::csv) {
        out << "t,c,tx,ty,tz,px,py,pz\n";
        for (const auto& frame : dataset.frames) {
            for (std::size_t c = 0; c < frame.targets.size(); ++c) {
                const Vec3& p = frame.targets[c];
                const Vec3& q = frame.predictions[c];
                out << frame.frame_index << ',' << c << ',' << format_real(p.x) << ',' << format_real(p.y) << ','
                    << format_real(p.z) << ',' << format_real(q.x) << ',' << format_real(q.y) << ','
                    << format_real(q.z) << '\n';
            }
        }
    } else {
        auto write_array = [&out](const std::vector<Vec3>& vs) {
            out << '[';
            for (std::size_t c = 0; c < vs.size(); ++c) {
                if (c) out << ',';
                out << '[' << format_real(vs[c].x) << ',' << format_real(vs[c].y) << ',' << format_real(vs[c].z) << ']';
            }
            out << ']';
        };
        for (const auto& frame : dataset.frames) {
            out << "{\"t\":" << frame.frame_index << ",\"targets\":";
            write_array(frame.targets);
            out << ",\"predictions\":";
            write_array(frame.predictions);
            out << "}\n";
        }
    }
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

ClassCounts load_counts(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::string line;
    std::size_t row = 0;
    bool have_header = false;
    std::map<long long, std::pair<std::string, long long>> rows;

    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (!have_header) {
            if (fields.size() != 3 || fields[0] != "class" || fields[1] != "name" || fields[2] != "count") {
                throw ParseError("expected header 'class,name,count'", row);
            }
            have_header = true;
            continue;
        }
        if (fields.size() != 3) throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), row);
        const long long c = parse_integer(fields[0], row);
        const long long n = parse_integer(fields[2], row);
        if (c < 0) throw ParseError("negative class index", row);
        if (!rows.emplace(c, std::make_pair(std::string(fields[1]), n)).second) {
            throw ParseError("duplicate class " + std::to_string(c), row);
        }
    }
    if (!have_header) throw ParseError("missing header", row);
    if (rows.empty()) throw ValidationError("count file '" + path.string() + "' lists no classes");

    ClassCounts result;
    long long expected = 0;
    for (auto& [c, entry] : rows) {
        if (c != expected) throw ValidationError("class indices must be contiguous from 0; missing " + std::to_string(expected));
        result.names.push_back(std::move(entry.first));
        result.counts.push_back(entry.second);
        ++expected;
    }
    return result;
}

void save_counts(const ClassCounts& counts, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "class,name,count\n";
    for (std::size_t c = 0; c < counts.counts.size(); ++c) {
        out << c << ',' << counts.names.at(c) << ',' << counts.counts[c] << '\n';
    }
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace magenta
