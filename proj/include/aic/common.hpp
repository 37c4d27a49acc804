#pragma once

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aic {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i32 = std::int32_t;
using i64 = std::int64_t;

inline constexpr u32 kNone32 = std::numeric_limits<u32>::max();
inline constexpr u64 kNone64 = std::numeric_limits<u64>::max();

// Error categories map onto CLI exit codes: parse/validation/config -> 2,
// runtime -> 3.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

inline LogLevel log_level() {
    static LogLevel lvl = [] {
        const char* v = std::getenv("AIC_LOG_LEVEL");
        if (!v) return LogLevel::info;
        std::string_view s(v);
        if (s == "quiet" || s == "0") return LogLevel::quiet;
        if (s == "debug" || s == "2") return LogLevel::debug;
        return LogLevel::info;
    }();
    return lvl;
}

enum class AgeBucket : u8 { child = 0, adult = 1, senior = 2 };
inline constexpr int kAgeBuckets = 3;

inline AgeBucket age_bucket_of(int age) {
    if (age <= 17) return AgeBucket::child;
    if (age <= 64) return AgeBucket::adult;
    return AgeBucket::senior;
}

inline const char* age_bucket_name(AgeBucket b) {
    switch (b) {
        case AgeBucket::child: return "child";
        case AgeBucket::adult: return "adult";
        case AgeBucket::senior: return "senior";
    }
    return "?";
}

inline AgeBucket age_bucket_from_name(std::string_view s) {
    if (s == "child") return AgeBucket::child;
    if (s == "adult") return AgeBucket::adult;
    if (s == "senior") return AgeBucket::senior;
    throw ParseError("unknown age bucket: " + std::string(s));
}

enum class PoiCategory : u8 {
    grocery_retail = 0,
    education,
    religious,
    food_service,
    accommodation,
    medical,
    office,
    other,
};
inline constexpr int kPoiCategories = 8;

inline const char* category_name(PoiCategory c) {
    switch (c) {
        case PoiCategory::grocery_retail: return "grocery_retail";
        case PoiCategory::education: return "education";
        case PoiCategory::religious: return "religious";
        case PoiCategory::food_service: return "food_service";
        case PoiCategory::accommodation: return "accommodation";
        case PoiCategory::medical: return "medical";
        case PoiCategory::office: return "office";
        case PoiCategory::other: return "other";
    }
    return "?";
}

inline PoiCategory category_from_name(std::string_view s) {
    for (int i = 0; i < kPoiCategories; ++i)
        if (s == category_name(static_cast<PoiCategory>(i)))
            return static_cast<PoiCategory>(i);
    throw ParseError("unknown POI category: " + std::string(s));
}

// Local-trip categories get the closest-five preference during destination
// choice.
inline bool is_local_category(PoiCategory c) {
    return c == PoiCategory::grocery_retail || c == PoiCategory::education ||
           c == PoiCategory::religious;
}

}  // namespace aic
