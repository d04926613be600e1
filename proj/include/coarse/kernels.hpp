#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

// Row kernels used by the metric engine. Every kernel has a scalar reference
// version; an AVX2 version is picked at runtime when the CPU supports it.
namespace coarse::kernels {

struct Table {
    // out[i] = max(out[i], |x[i] - c| * w)
    void (*free_axis_max)(const std::int64_t* x, std::size_t n, std::int64_t c, std::int64_t w,
                          std::int64_t* out);
    // out[i] = max(out[i], x[i] != c ? level : 0)
    void (*discrete_axis_max)(const std::int64_t* x, std::size_t n, std::int64_t c,
                              std::int64_t level, std::int64_t* out);
    // out[i] = round(sqrt((xs[i]-qx)^2 + (ys[i]-qy)^2) * scale), as int64
    void (*euclid_row)(const double* xs, const double* ys, std::size_t n, double qx, double qy,
                       double scale, std::int64_t* out);
    // key[i] = min(key[i], row[i]) where !done[i]; returns argmin over !done (n if none)
    std::size_t (*prim_update)(const std::int64_t* row, std::int64_t* key, const std::uint8_t* done,
                               std::size_t n);
    // number of i with row[i] <= t
    std::size_t (*count_le)(const std::int64_t* row, std::size_t n, std::int64_t t);
    // max of b[i] over i with a[i] <= t; returns -1 when no i qualifies
    std::int64_t (*max_where_le)(const std::int64_t* a, const std::int64_t* b, std::size_t n,
                                 std::int64_t t);
    const char* name;
};

const Table& scalar();
// nullptr when not compiled in or not supported by this CPU
const Table* avx2();
const Table& active();

// "auto", "scalar" or "avx2"; returns false if the request cannot be honoured
bool select(const std::string& which);

}  // namespace coarse::kernels
