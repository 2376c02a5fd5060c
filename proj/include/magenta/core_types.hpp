#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace magenta {

// Error taxonomy. The CLI maps every one of these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row)
        : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Raised when a function is called outside its documented domain.
class ContractError : public Error {
public:
    using Error::Error;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3& operator+=(const Vec3& o) noexcept { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) noexcept { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) noexcept { x *= s; y *= s; z *= s; return *this; }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) noexcept { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) noexcept { return a -= b; }
    friend constexpr Vec3 operator-(const Vec3& a) noexcept { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return a *= s; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

    constexpr double& operator[](std::size_t i) noexcept { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double operator[](std::size_t i) const noexcept { return i == 0 ? x : (i == 1 ? y : z); }
};

constexpr double dot(const Vec3& a, const Vec3& b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr double squared_norm(const Vec3& v) noexcept { return dot(v, v); }
inline double norm(const Vec3& v) noexcept { return std::sqrt(squared_norm(v)); }

// Tolerance of the {0, 1} target-norm test.
inline constexpr double kActivityTolerance = 1e-9;

// Per-frame ACCDOA targets and predictions. Activity is carried by the
// target norm: exactly 1 for an active class, 0 otherwise.
struct AccdoaFrame {
    long long frame_index = 0;
    std::vector<Vec3> targets;
    std::vector<Vec3> predictions;

    std::size_t num_classes() const noexcept { return targets.size(); }
    bool is_active(std::size_t c) const { return squared_norm(targets.at(c)) > 0.25; }
};

struct Dataset {
    std::vector<AccdoaFrame> frames;
    std::vector<std::string> class_names;
    std::vector<long long> frame_counts;

    std::size_t num_frames() const noexcept { return frames.size(); }
    std::size_t num_classes() const noexcept { return class_names.size(); }
};

enum class FrameLayout { csv, jsonl };

FrameLayout layout_from_path(const std::filesystem::path& path);

// Validates shape and activity encoding, then recomputes frame_counts
// from the targets. Throws ValidationError on any violation.
void validate_and_count(Dataset& dataset);

Dataset load_frames(const std::filesystem::path& path, FrameLayout layout);
inline Dataset load_frames(const std::filesystem::path& path) { return load_frames(path, layout_from_path(path)); }

// Values are written with 17 significant digits, so reloading is bit-exact.
void save_frames(const Dataset& dataset, const std::filesystem::path& path, FrameLayout layout);

struct ClassCounts {
    std::vector<std::string> names;
    std::vector<long long> counts;
};

// CSV `class,name,count`; class indices must be 0..C-1, each once.
ClassCounts load_counts(const std::filesystem::path& path);
void save_counts(const ClassCounts& counts, const std::filesystem::path& path);

// 17 significant digits; parsing the result back yields the same double.
std::string format_real(double value);

}  // namespace magenta
