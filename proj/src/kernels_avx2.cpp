// Compiled with -mavx2. Only reached after __builtin_cpu_supports("avx2").
#include "kernels_impl.hpp"

#if COARSE_HAVE_AVX2

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace coarse::kernels::detail {

namespace {

inline __m256i max64(__m256i a, __m256i b) {
    return _mm256_blendv_epi8(a, b, _mm256_cmpgt_epi64(b, a));
}

inline __m256i abs64(__m256i d) {
    __m256i neg = _mm256_cmpgt_epi64(_mm256_setzero_si256(), d);
    return _mm256_blendv_epi8(d, _mm256_sub_epi64(_mm256_setzero_si256(), d), neg);
}

void free_axis_max(const std::int64_t* x, std::size_t n, std::int64_t c, std::int64_t w,
                   std::int64_t* out) {
    std::size_t i = 0;
    // products via 32x32->64 multiply; coordinates are bounded well below 2^31
    if (w >= 0 && w < (std::int64_t{1} << 31)) {
        const __m256i vc = _mm256_set1_epi64x(c);
        const __m256i vw = _mm256_set1_epi64x(w);
        for (; i + 4 <= n; i += 4) {
            __m256i d = abs64(_mm256_sub_epi64(_mm256_loadu_si256((const __m256i*)(x + i)), vc));
            if (w != 1) d = _mm256_mul_epu32(d, vw);
            __m256i o = _mm256_loadu_si256((const __m256i*)(out + i));
            _mm256_storeu_si256((__m256i*)(out + i), max64(o, d));
        }
    }
    for (; i < n; ++i) {
        std::int64_t d = x[i] - c;
        d = (d < 0 ? -d : d) * w;
        if (d > out[i]) out[i] = d;
    }
}

void discrete_axis_max(const std::int64_t* x, std::size_t n, std::int64_t c, std::int64_t level,
                       std::int64_t* out) {
    const __m256i vc = _mm256_set1_epi64x(c);
    const __m256i vl = _mm256_set1_epi64x(level);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i eq = _mm256_cmpeq_epi64(_mm256_loadu_si256((const __m256i*)(x + i)), vc);
        __m256i v = _mm256_andnot_si256(eq, vl);
        __m256i o = _mm256_loadu_si256((const __m256i*)(out + i));
        _mm256_storeu_si256((__m256i*)(out + i), max64(o, v));
    }
    for (; i < n; ++i)
        if (x[i] != c && level > out[i]) out[i] = level;
}

void euclid_row(const double* xs, const double* ys, std::size_t n, double qx, double qy,
                double scale, std::int64_t* out) {
    const __m256d vx = _mm256_set1_pd(qx), vy = _mm256_set1_pd(qy), vs = _mm256_set1_pd(scale);
    alignas(32) double buf[4];
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vx);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vy);
        __m256d s = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        __m256d r = _mm256_round_pd(_mm256_mul_pd(_mm256_sqrt_pd(s), vs),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
        _mm256_store_pd(buf, r);
        for (int k = 0; k < 4; ++k) out[i + k] = static_cast<std::int64_t>(buf[k]);
    }
    for (; i < n; ++i) {
        double dx = xs[i] - qx, dy = ys[i] - qy;
        double s = dx * dx;
        s = s + dy * dy;
        out[i] = static_cast<std::int64_t>(std::nearbyint(std::sqrt(s) * scale));
    }
}

std::size_t prim_update(const std::int64_t* row, std::int64_t* key, const std::uint8_t* done,
                        std::size_t n) {
    constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
    const __m256i vmax = _mm256_set1_epi64x(kMax);
    __m256i bestv = vmax;
    __m256i besti = _mm256_set1_epi64x(-1);
    __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
    const __m256i four = _mm256_set1_epi64x(4);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        int d4;
        __builtin_memcpy(&d4, done + i, 4);
        __m256i dm = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(d4));
        __m256i live = _mm256_cmpeq_epi64(dm, _mm256_setzero_si256());
        __m256i k = _mm256_loadu_si256((const __m256i*)(key + i));
        __m256i r = _mm256_loadu_si256((const __m256i*)(row + i));
        __m256i lower = _mm256_and_si256(_mm256_cmpgt_epi64(k, r), live);
        k = _mm256_blendv_epi8(k, r, lower);
        _mm256_storeu_si256((__m256i*)(key + i), k);
        __m256i cand = _mm256_blendv_epi8(vmax, k, live);
        __m256i better = _mm256_and_si256(_mm256_cmpgt_epi64(bestv, cand), live);
        bestv = _mm256_blendv_epi8(bestv, cand, better);
        besti = _mm256_blendv_epi8(besti, idx, better);
        idx = _mm256_add_epi64(idx, four);
    }
    alignas(32) std::int64_t bv[4], bi[4];
    _mm256_store_si256((__m256i*)bv, bestv);
    _mm256_store_si256((__m256i*)bi, besti);
    std::size_t best = n;
    std::int64_t b = kMax;
    for (int l = 0; l < 4; ++l) {
        if (bi[l] < 0) continue;
        if (bv[l] < b || (bv[l] == b && static_cast<std::size_t>(bi[l]) < best)) {
            b = bv[l];
            best = static_cast<std::size_t>(bi[l]);
        }
    }
    for (; i < n; ++i) {
        if (done[i]) continue;
        if (row[i] < key[i]) key[i] = row[i];
        if (key[i] < b) { b = key[i]; best = i; }
    }
    return best;
}

std::size_t count_le(const std::int64_t* row, std::size_t n, std::int64_t t) {
    const __m256i vt = _mm256_set1_epi64x(t);
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i gt = _mm256_cmpgt_epi64(_mm256_loadu_si256((const __m256i*)(row + i)), vt);
        acc = _mm256_sub_epi64(acc, _mm256_andnot_si256(gt, _mm256_set1_epi64x(-1)));
    }
    alignas(32) std::int64_t a[4];
    _mm256_store_si256((__m256i*)a, acc);
    std::size_t c = static_cast<std::size_t>(a[0] + a[1] + a[2] + a[3]);
    for (; i < n; ++i) c += row[i] <= t;
    return c;
}

std::int64_t max_where_le(const std::int64_t* a, const std::int64_t* b, std::size_t n,
                          std::int64_t t) {
    const __m256i vt = _mm256_set1_epi64x(t);
    const __m256i neg1 = _mm256_set1_epi64x(-1);
    __m256i m = neg1;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i gt = _mm256_cmpgt_epi64(_mm256_loadu_si256((const __m256i*)(a + i)), vt);
        __m256i v = _mm256_blendv_epi8(_mm256_loadu_si256((const __m256i*)(b + i)), neg1, gt);
        m = max64(m, v);
    }
    alignas(32) std::int64_t r[4];
    _mm256_store_si256((__m256i*)r, m);
    std::int64_t out = -1;
    for (int l = 0; l < 4; ++l)
        if (r[l] > out) out = r[l];
    for (; i < n; ++i)
        if (a[i] <= t && b[i] > out) out = b[i];
    return out;
}

const Table kAvx2{free_axis_max, discrete_axis_max, euclid_row, prim_update,
                  count_le,      max_where_le,      "avx2"};

}  // namespace

const Table& avx2_table() { return kAvx2; }

}  // namespace coarse::kernels::detail

#endif
