#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "coarse/kernels.hpp"
#include "kernels_impl.hpp"

namespace coarse::kernels {

namespace {

void free_axis_max(const std::int64_t* x, std::size_t n, std::int64_t c, std::int64_t w,
                   std::int64_t* out) {
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t d = x[i] - c;
        d = (d < 0 ? -d : d) * w;
        if (d > out[i]) out[i] = d;
    }
}

void discrete_axis_max(const std::int64_t* x, std::size_t n, std::int64_t c, std::int64_t level,
                       std::int64_t* out) {
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] != c && level > out[i]) out[i] = level;
}

void euclid_row(const double* xs, const double* ys, std::size_t n, double qx, double qy,
                double scale, std::int64_t* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double dx = xs[i] - qx, dy = ys[i] - qy;
        double s = dx * dx;
        s = s + dy * dy;
        out[i] = static_cast<std::int64_t>(std::nearbyint(std::sqrt(s) * scale));
    }
}

std::size_t prim_update(const std::int64_t* row, std::int64_t* key, const std::uint8_t* done,
                        std::size_t n) {
    std::size_t best = n;
    std::int64_t bv = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        if (row[i] < key[i]) key[i] = row[i];
        if (key[i] < bv) { bv = key[i]; best = i; }
    }
    return best;
}

std::size_t count_le(const std::int64_t* row, std::size_t n, std::int64_t t) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += row[i] <= t;
    return c;
}

std::int64_t max_where_le(const std::int64_t* a, const std::int64_t* b, std::size_t n,
                          std::int64_t t) {
    std::int64_t m = -1;
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] <= t && b[i] > m) m = b[i];
    return m;
}

const Table kScalar{free_axis_max, discrete_axis_max, euclid_row, prim_update,
                    count_le,      max_where_le,      "scalar"};

std::atomic<const Table*> g_active{nullptr};

}  // namespace

const Table& scalar() { return kScalar; }

const Table* avx2() {
#if COARSE_HAVE_AVX2
    if (__builtin_cpu_supports("avx2")) return &detail::avx2_table();
#endif
    return nullptr;
}

const Table& active() {
    if (!g_active.load()) {
        const char* env = std::getenv("COARSE_SIMD");
        if (!env || !select(env)) select("auto");
    }
    return *g_active.load();
}

bool select(const std::string& which) {
    if (which == "scalar") {
        g_active = &kScalar;
        return true;
    }
    if (which == "avx2" || which == "auto") {
        if (const Table* t = avx2()) {
            g_active = t;
            return true;
        }
        if (which == "auto") {
            g_active = &kScalar;
            return true;
        }
    }
    return false;
}

}  // namespace coarse::kernels
