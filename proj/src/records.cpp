#include "qkd/records.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qkd {

namespace {

void put_u64le(uint8_t* p, uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<uint8_t>(v >> (8 * i));
}

uint64_t get_u64le(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t{p[i]} << (8 * i);
    return v;
}

void put_f64le(uint8_t* p, double d) {
    uint64_t v;
    std::memcpy(&v, &d, 8);
    put_u64le(p, v);
}

double get_f64le(const uint8_t* p) {
    uint64_t v = get_u64le(p);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

void write_raw(std::ostream& os, uint64_t index, uint8_t flags, uint8_t code, double ts) {
    uint8_t buf[kRecordBytes];
    put_u64le(buf, index);
    buf[8] = flags;
    buf[9] = code;
    put_f64le(buf + 10, ts);
    os.write(reinterpret_cast<const char*>(buf), kRecordBytes);
}

bool read_raw(std::istream& is, uint64_t& index, uint8_t& flags, uint8_t& code, double& ts) {
    uint8_t buf[kRecordBytes];
    is.read(reinterpret_cast<char*>(buf), kRecordBytes);
    if (is.gcount() == 0 && is.eof()) return false;
    if (is.gcount() != static_cast<std::streamsize>(kRecordBytes))
        throw std::runtime_error("record file: truncated record");
    index = get_u64le(buf);
    flags = buf[8];
    code = buf[9];
    ts = get_f64le(buf + 10);
    return true;
}

}  // namespace

void write_pulse_records(std::ostream& os, const std::vector<PulseRecord>& recs) {
    for (const auto& r : recs) {
        uint8_t code = static_cast<uint8_t>((static_cast<uint8_t>(r.basis) << 1) | (r.bit & 1));
        write_raw(os, r.pulse_index, r.photon_count, code, r.timestamp);
    }
}

std::vector<PulseRecord> read_pulse_records(std::istream& is) {
    std::vector<PulseRecord> out;
    uint64_t index;
    uint8_t flags, code;
    double ts;
    while (read_raw(is, index, flags, code, ts)) {
        PulseRecord r;
        r.pulse_index = index;
        r.photon_count = flags;
        r.basis = (code >> 1) & 1 ? Basis::X : Basis::Z;
        r.bit = code & 1;
        r.timestamp = ts;
        if (r.photon_count > 2) throw std::runtime_error("pulse record: photon_count > 2");
        out.push_back(r);
    }
    return out;
}

void write_click_records(std::ostream& os, const std::vector<ClickRecord>& recs) {
    for (const auto& r : recs)
        write_raw(os, r.pulse_index, r.is_dark ? 1 : 0, r.detector, r.timestamp);
}

std::vector<ClickRecord> read_click_records(std::istream& is) {
    std::vector<ClickRecord> out;
    uint64_t index;
    uint8_t flags, code;
    double ts;
    while (read_raw(is, index, flags, code, ts)) {
        ClickRecord r;
        r.pulse_index = index;
        r.is_dark = flags & 1;
        r.detector = code;
        r.timestamp = ts;
        if (r.detector > 3) throw std::runtime_error("click record: detector id > 3");
        out.push_back(r);
    }
    return out;
}

namespace {

template <typename T, typename W>
void save_records(const std::string& path, const std::vector<T>& recs, W writer) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    writer(os, recs);
    if (!os) throw std::runtime_error("write failed: " + path);
}

template <typename R>
auto load_records(const std::string& path, R reader) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return reader(is);
}

}  // namespace

void save_pulse_records(const std::string& path, const std::vector<PulseRecord>& recs) {
    save_records(path, recs, write_pulse_records);
}
std::vector<PulseRecord> load_pulse_records(const std::string& path) {
    return load_records(path, read_pulse_records);
}
void save_click_records(const std::string& path, const std::vector<ClickRecord>& recs) {
    save_records(path, recs, write_click_records);
}
std::vector<ClickRecord> load_click_records(const std::string& path) {
    return load_records(path, read_click_records);
}

}  // namespace qkd
