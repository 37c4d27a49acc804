#pragma once

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "aic/common.hpp"

namespace aic {

enum class EventKind : u8 {
    arrive_poi = 0,
    depart_poi = 1,
    infection = 2,
    state_change = 3,
    trip_decision = 4,
    external_arrival = 5,
};

// Fixed 29-byte little-endian frame: u32 minute, u8 kind, u64 subject,
// u64 place, u64 payload.
struct EventRec {
    u32 minute = 0;
    EventKind kind = EventKind::arrive_poi;
    u64 subject = 0;  // super-agent id
    u64 place = 0;    // poi or cell id
    u64 payload = 0;

    bool operator==(const EventRec&) const = default;
};

inline constexpr std::size_t kEventFrameBytes = 29;

inline void write_event_log(const std::vector<EventRec>& events, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimError("cannot write event log: " + path);
    std::vector<char> buf;
    buf.reserve(events.size() * kEventFrameBytes);
    auto put = [&](const void* p, std::size_t n) {
        const char* c = static_cast<const char*>(p);
        buf.insert(buf.end(), c, c + n);
    };
    for (const EventRec& e : events) {
        put(&e.minute, 4);
        u8 k = u8(e.kind);
        put(&k, 1);
        put(&e.subject, 8);
        put(&e.place, 8);
        put(&e.payload, 8);
    }
    out.write(buf.data(), std::streamsize(buf.size()));
}

inline std::vector<EventRec> read_event_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open event log: " + path);
    std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() % kEventFrameBytes != 0)
        throw ParseError("event log size is not a multiple of the frame size");
    std::vector<EventRec> events(buf.size() / kEventFrameBytes);
    const char* p = buf.data();
    for (EventRec& e : events) {
        std::memcpy(&e.minute, p, 4);
        u8 k;
        std::memcpy(&k, p + 4, 1);
        e.kind = EventKind(k);
        std::memcpy(&e.subject, p + 5, 8);
        std::memcpy(&e.place, p + 13, 8);
        std::memcpy(&e.payload, p + 21, 8);
        p += kEventFrameBytes;
    }
    return events;
}

}  // namespace aic
