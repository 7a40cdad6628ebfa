#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qkd {

enum class Basis : uint8_t { Z = 0, X = 1 };

// Receiver arm layout: detectors 0/1 measure Z (bit 0/1), 2/3 measure X.
inline Basis basis_of_detector(uint8_t det) { return det >= 2 ? Basis::X : Basis::Z; }
inline uint8_t bit_of_detector(uint8_t det) { return det & 1; }
inline uint8_t detector_of(Basis b, uint8_t bit) {
    return static_cast<uint8_t>((b == Basis::X ? 2 : 0) | (bit & 1));
}

constexpr uint64_t kNoPulse = UINT64_MAX;  // pulse_index sentinel

struct PulseRecord {
    uint64_t pulse_index = 0;
    Basis basis = Basis::Z;
    uint8_t bit = 0;
    uint8_t photon_count = 0;  // 0, 1 or 2
    double timestamp = 0.0;    // emission time, seconds
};

struct ClickRecord {
    uint64_t pulse_index = kNoPulse;  // owning pulse window, or kNoPulse
    uint8_t detector = 0;             // 0..3
    bool is_dark = false;
    double timestamp = 0.0;           // detection time, seconds
};

// Fixed-width 18-byte little-endian record:
//   u64 pulse_index | u8 flags | u8 code | f64 timestamp
// Pulse files:  flags = photon_count, code = basis<<1 | bit.
// Click files:  flags = is_dark,      code = detector id.
// Files are raw record arrays with no header; the kind is implied by the
// file role (pulse vs click).
constexpr std::size_t kRecordBytes = 18;

void write_pulse_records(std::ostream& os, const std::vector<PulseRecord>& recs);
std::vector<PulseRecord> read_pulse_records(std::istream& is);
void write_click_records(std::ostream& os, const std::vector<ClickRecord>& recs);
std::vector<ClickRecord> read_click_records(std::istream& is);

void save_pulse_records(const std::string& path, const std::vector<PulseRecord>& recs);
std::vector<PulseRecord> load_pulse_records(const std::string& path);
void save_click_records(const std::string& path, const std::vector<ClickRecord>& recs);
std::vector<ClickRecord> load_click_records(const std::string& path);

}  // namespace qkd
