#include "joss/ingest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace joss {
namespace {

std::runtime_error ingest_error(const std::filesystem::path& path, const std::string& what) {
    return std::runtime_error("ingest: " + path.string() + ": " + what);
}

double parse_number(const std::string& field, const std::filesystem::path& path, int line,
                    int column) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    // Tolerate surrounding spaces, not anything else.
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || begin == end) {
        throw ingest_error(path, "line " + std::to_string(line) + ", column " +
                                     std::to_string(column) + ": not a number: '" + field + "'");
    }
    return value;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

void Recording::validate() const {
    if (ppg.empty()) throw std::invalid_argument("Recording: empty channels");
    if (accel_x.size() != ppg.size() || accel_y.size() != ppg.size() ||
        accel_z.size() != ppg.size()) {
        throw std::invalid_argument("Recording: channel lengths differ");
    }
    if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("Recording: sample_rate_hz must be > 0");
}

Recording load_recording(const std::filesystem::path& csv_path, const RecordingMeta& meta) {
    std::ifstream in(csv_path);
    if (!in) throw ingest_error(csv_path, "cannot open file");

    std::string line;
    if (!std::getline(in, line)) throw ingest_error(csv_path, "empty file");

    auto header = split_csv(line);
    for (auto& h : header) h = lower(h);
    bool has_ecg = header.size() == 5 && header[4] == "ecg";
    if (!(header.size() == 4 || has_ecg) || header[0] != "ppg" || header[1] != "ax" ||
        header[2] != "ay" || header[3] != "az") {
        throw ingest_error(csv_path, "expected header 'ppg,ax,ay,az[,ecg]', got '" + line + "'");
    }
    const std::size_t expected = header.size();

    Recording rec;
    rec.id = meta.id;
    rec.sample_rate_hz = meta.sample_rate_hz;

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv(line);
        if (fields.size() != expected) {
            throw ingest_error(csv_path, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(expected) + " fields, got " +
                                             std::to_string(fields.size()));
        }
        rec.ppg.push_back(parse_number(fields[0], csv_path, line_no, 1));
        rec.accel_x.push_back(parse_number(fields[1], csv_path, line_no, 2));
        rec.accel_y.push_back(parse_number(fields[2], csv_path, line_no, 3));
        rec.accel_z.push_back(parse_number(fields[3], csv_path, line_no, 4));
        // ecg column, when present, is ignored
    }
    if (rec.ppg.empty()) throw ingest_error(csv_path, "no data rows");
    rec.validate();
    return rec;
}

RecordingMeta load_sidecar(const std::filesystem::path& sidecar_path) {
    std::ifstream in(sidecar_path);
    if (!in) throw ingest_error(sidecar_path, "cannot open sidecar");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ingest_error(sidecar_path, std::string("invalid JSON: ") + e.what());
    }
    RecordingMeta meta;
    if (!j.contains("id") || !j.contains("sample_rate_hz")) {
        throw ingest_error(sidecar_path, "sidecar needs keys 'id' and 'sample_rate_hz'");
    }
    meta.id = j.at("id").get<std::string>();
    meta.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    if (!(meta.sample_rate_hz > 0.0)) throw ingest_error(sidecar_path, "sample_rate_hz must be > 0");
    return meta;
}

Recording load_recording(const std::filesystem::path& csv_path,
                         const std::filesystem::path& sidecar_path) {
    return load_recording(csv_path, load_sidecar(sidecar_path));
}

GroundTruthTrace load_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ingest_error(path, "cannot open file");

    GroundTruthTrace truth;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line_no == 1 && lower(split_csv(line)[0]) == "bpm") continue;  // optional header
        double v = parse_number(line, path, line_no, 1);
        if (!(v > 20.0 && v < 300.0)) {
            throw ingest_error(path, "line " + std::to_string(line_no) + ": BPM value " +
                                         std::to_string(v) + " outside (20, 300)");
        }
        truth.bpm_true.push_back(v);
    }
    if (truth.bpm_true.empty()) throw ingest_error(path, "empty ground truth");
    return truth;
}

void save_recording(const Recording& rec, const std::filesystem::path& csv_path,
                    const std::filesystem::path& sidecar_path) {
    rec.validate();
    std::ofstream out(csv_path);
    if (!out) throw ingest_error(csv_path, "cannot open for writing");
    out << "ppg,ax,ay,az\n";
    char buf[512];
    for (std::size_t i = 0; i < rec.length(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", rec.ppg[i], rec.accel_x[i],
                      rec.accel_y[i], rec.accel_z[i]);
        out << buf;
    }
    nlohmann::json j{{"id", rec.id}, {"sample_rate_hz", rec.sample_rate_hz}};
    std::ofstream side(sidecar_path);
    if (!side) throw ingest_error(sidecar_path, "cannot open for writing");
    side << j.dump(2) << "\n";
}

void save_truth(const GroundTruthTrace& truth, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ingest_error(path, "cannot open for writing");
    out << "bpm\n";
    char buf[64];
    for (double v : truth.bpm_true) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out << buf;
    }
}

std::filesystem::path sidecar_path_for(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".json");
    return p;
}

}  // namespace joss
