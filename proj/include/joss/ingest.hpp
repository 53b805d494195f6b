#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace joss {

// One multichannel wrist recording: PPG plus the three accelerometer axes,
// uniformly sampled. Ground truth (when available) lives in a separate trace.
struct Recording {
    std::vector<double> ppg;
    std::vector<double> accel_x;
    std::vector<double> accel_y;
    std::vector<double> accel_z;
    double sample_rate_hz = 0.0;
    std::string id;

    std::size_t length() const { return ppg.size(); }

    // Throws std::invalid_argument if channels are ragged, empty, or the
    // sample rate is not positive.
    void validate() const;
};

// One reference BPM value per analysis window, in window order.
struct GroundTruthTrace {
    std::vector<double> bpm_true;
};

struct RecordingMeta {
    std::string id;
    double sample_rate_hz = 0.0;
};

// CSV with mandatory header `ppg,ax,ay,az`; an optional trailing `ecg`
// column is ignored. Parse failures name the offending line and column.
Recording load_recording(const std::filesystem::path& csv_path, const RecordingMeta& meta);

// Same, reading id/sample_rate_hz from a JSON sidecar {"id": ..., "sample_rate_hz": ...}.
Recording load_recording(const std::filesystem::path& csv_path,
                         const std::filesystem::path& sidecar_path);

RecordingMeta load_sidecar(const std::filesystem::path& sidecar_path);

// Single-column CSV of BPM values, optional `bpm` header. Values must lie in
// (20, 300).
GroundTruthTrace load_truth(const std::filesystem::path& path);

// Writers emit 17 significant digits so a load_recording round trip is exact.
void save_recording(const Recording& rec, const std::filesystem::path& csv_path,
                    const std::filesystem::path& sidecar_path);
void save_truth(const GroundTruthTrace& truth, const std::filesystem::path& path);

// Conventional sidecar location: the recording path with its extension
// replaced by ".json".
std::filesystem::path sidecar_path_for(const std::filesystem::path& csv_path);

}  // namespace joss
