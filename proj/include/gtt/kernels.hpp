#ifndef GTT_KERNELS_HPP
#define GTT_KERNELS_HPP

// Data-parallel layer kernels. The OpenMP versions partition work by
// output element (or by filter / channel for weight and input
// gradients), so no two threads write the same location and every
// element is accumulated in the same order regardless of thread count:
// results are bitwise identical to the serial reference in gtt::ref.

#include <algorithm>
#include <cstring>

namespace gtt::kernels {

// in: C x H x W, weights: F x C x K x K, out: F x Ho x Wo
// Ho = (H + 2*pad - K) / stride + 1.
template <class S>
void conv2d_forward(const S* in, int C, int H, int W, const S* wgt, const S* bias, int F,
                    int K, int stride, int pad, S* out, int Ho, int Wo) {
    if (stride == 1) {
#pragma omp parallel for schedule(static)
        for (int f = 0; f < F; ++f) {
            S* of = out + static_cast<std::size_t>(f) * Ho * Wo;
            std::fill(of, of + static_cast<std::size_t>(Ho) * Wo, bias[f]);
            for (int c = 0; c < C; ++c) {
                const S* ic = in + static_cast<std::size_t>(c) * H * W;
                for (int ky = 0; ky < K; ++ky) {
                    for (int kx = 0; kx < K; ++kx) {
                        const S wv = wgt[((static_cast<std::size_t>(f) * C + c) * K + ky) * K + kx];
                        for (int oy = 0; oy < Ho; ++oy) {
                            const int iy = oy + ky - pad;
                            if (iy < 0 || iy >= H) continue;
                            const int x0 = std::max(0, pad - kx);
                            const int x1 = std::min(Wo, W + pad - kx);
                            const S* irow = ic + static_cast<std::size_t>(iy) * W + (x0 + kx - pad);
                            S* orow = of + static_cast<std::size_t>(oy) * Wo + x0;
                            for (int ox = 0; ox < x1 - x0; ++ox) orow[ox] += wv * irow[ox];
                        }
                    }
                }
            }
        }
        return;
    }
    // general stride
#pragma omp parallel for schedule(static)
    for (int f = 0; f < F; ++f) {
        for (int oy = 0; oy < Ho; ++oy) {
            for (int ox = 0; ox < Wo; ++ox) {
                S acc = bias[f];
                for (int c = 0; c < C; ++c) {
                    for (int ky = 0; ky < K; ++ky) {
                        const int iy = oy * stride + ky - pad;
                        if (iy < 0 || iy >= H) continue;
                        for (int kx = 0; kx < K; ++kx) {
                            const int ix = ox * stride + kx - pad;
                            if (ix < 0 || ix >= W) continue;
                            acc += wgt[((static_cast<std::size_t>(f) * C + c) * K + ky) * K + kx] *
                                   in[(static_cast<std::size_t>(c) * H + iy) * W + ix];
                        }
                    }
                }
                out[(static_cast<std::size_t>(f) * Ho + oy) * Wo + ox] = acc;
            }
        }
    }
}

// Accumulates into d_wgt / d_bias; writes d_in (if non-null).
template <class S>
void conv2d_backward(const S* in, int C, int H, int W, const S* wgt, int F, int K,
                     int stride, int pad, const S* d_out, int Ho, int Wo, S* d_in,
                     S* d_wgt, S* d_bias) {
    if (d_wgt) {
#pragma omp parallel for schedule(static)
        for (int f = 0; f < F; ++f) {
            const S* df = d_out + static_cast<std::size_t>(f) * Ho * Wo;
            S db = 0;
            for (std::size_t i = 0; i < static_cast<std::size_t>(Ho) * Wo; ++i) db += df[i];
            d_bias[f] += db;
            for (int c = 0; c < C; ++c) {
                const S* ic = in + static_cast<std::size_t>(c) * H * W;
                for (int ky = 0; ky < K; ++ky) {
                    for (int kx = 0; kx < K; ++kx) {
                        S acc = 0;
                        for (int oy = 0; oy < Ho; ++oy) {
                            const int iy = oy * stride + ky - pad;
                            if (iy < 0 || iy >= H) continue;
                            for (int ox = 0; ox < Wo; ++ox) {
                                const int ix = ox * stride + kx - pad;
                                if (ix < 0 || ix >= W) continue;
                                acc += df[static_cast<std::size_t>(oy) * Wo + ox] *
                                       ic[static_cast<std::size_t>(iy) * W + ix];
                            }
                        }
                        d_wgt[((static_cast<std::size_t>(f) * C + c) * K + ky) * K + kx] += acc;
                    }
                }
            }
        }
    }
    if (d_in) {
#pragma omp parallel for schedule(static)
        for (int c = 0; c < C; ++c) {
            S* dc = d_in + static_cast<std::size_t>(c) * H * W;
            std::fill(dc, dc + static_cast<std::size_t>(H) * W, S(0));
            for (int f = 0; f < F; ++f) {
                const S* df = d_out + static_cast<std::size_t>(f) * Ho * Wo;
                for (int ky = 0; ky < K; ++ky) {
                    for (int kx = 0; kx < K; ++kx) {
                        const S wv = wgt[((static_cast<std::size_t>(f) * C + c) * K + ky) * K + kx];
                        for (int oy = 0; oy < Ho; ++oy) {
                            const int iy = oy * stride + ky - pad;
                            if (iy < 0 || iy >= H) continue;
                            for (int ox = 0; ox < Wo; ++ox) {
                                const int ix = ox * stride + kx - pad;
                                if (ix < 0 || ix >= W) continue;
                                dc[static_cast<std::size_t>(iy) * W + ix] +=
                                    wv * df[static_cast<std::size_t>(oy) * Wo + ox];
                            }
                        }
                    }
                }
            }
        }
    }
}

// 2x2 max pooling, even H and W. argmax records the winning offset
// within the source channel plane for the backward pass.
template <class S>
void maxpool2_forward(const S* in, int C, int H, int W, S* out, int* argmax) {
    const int Ho = H / 2, Wo = W / 2;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < C; ++c) {
        const S* ic = in + static_cast<std::size_t>(c) * H * W;
        S* oc = out + static_cast<std::size_t>(c) * Ho * Wo;
        int* ac = argmax + static_cast<std::size_t>(c) * Ho * Wo;
        for (int oy = 0; oy < Ho; ++oy) {
            for (int ox = 0; ox < Wo; ++ox) {
                int best = (2 * oy) * W + 2 * ox;
                S bv = ic[best];
                const int cands[3] = {(2 * oy) * W + 2 * ox + 1, (2 * oy + 1) * W + 2 * ox,
                                      (2 * oy + 1) * W + 2 * ox + 1};
                for (int idx : cands) {
                    if (ic[idx] > bv) {
                        bv = ic[idx];
                        best = idx;
                    }
                }
                oc[static_cast<std::size_t>(oy) * Wo + ox] = bv;
                ac[static_cast<std::size_t>(oy) * Wo + ox] = best;
            }
        }
    }
}

template <class S>
void maxpool2_backward(const S* d_out, int C, int H, int W, const int* argmax, S* d_in) {
    const int Ho = H / 2, Wo = W / 2;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < C; ++c) {
        S* dc = d_in + static_cast<std::size_t>(c) * H * W;
        std::fill(dc, dc + static_cast<std::size_t>(H) * W, S(0));
        const S* doc = d_out + static_cast<std::size_t>(c) * Ho * Wo;
        const int* ac = argmax + static_cast<std::size_t>(c) * Ho * Wo;
        for (std::size_t i = 0; i < static_cast<std::size_t>(Ho) * Wo; ++i)
            dc[ac[i]] += doc[i];
    }
}

// y = W x + b, W is rows x cols row-major.
template <class S>
void linear_forward(const S* wgt, const S* bias, int rows, int cols, const S* x, S* y) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        const S* wr = wgt + static_cast<std::size_t>(r) * cols;
        S acc = bias[r];
        for (int i = 0; i < cols; ++i) acc += wr[i] * x[i];
        y[r] = acc;
    }
}

template <class S>
void linear_backward(const S* wgt, int rows, int cols, const S* x, const S* d_y, S* d_x,
                     S* d_wgt, S* d_bias) {
    if (d_wgt) {
#pragma omp parallel for schedule(static)
        for (int r = 0; r < rows; ++r) {
            S* dwr = d_wgt + static_cast<std::size_t>(r) * cols;
            const S g = d_y[r];
            for (int i = 0; i < cols; ++i) dwr[i] += g * x[i];
            d_bias[r] += g;
        }
    }
    if (d_x) {
        // gather form: each input index owned by one thread
#pragma omp parallel for schedule(static)
        for (int i = 0; i < cols; ++i) {
            S acc = 0;
            for (int r = 0; r < rows; ++r)
                acc += wgt[static_cast<std::size_t>(r) * cols + i] * d_y[r];
            d_x[i] = acc;
        }
    }
}

template <class S>
void relu_forward(const S* x, std::size_t n, S* y) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        y[i] = x[i] > S(0) ? x[i] : S(0);
}

template <class S>
void relu_backward(const S* x, const S* d_y, std::size_t n, S* d_x) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        d_x[i] = x[i] > S(0) ? d_y[i] : S(0);
}

} // namespace gtt::kernels

// Straight-line serial implementations retained as the test and
// benchmark baseline for the OpenMP kernels above.
namespace gtt::ref {

template <class S>
void conv2d_forward(const S* in, int C, int H, int W, const S* wgt, const S* bias, int F,
                    int K, int stride, int pad, S* out, int Ho, int Wo) {
    for (int f = 0; f < F; ++f) {
        for (int oy = 0; oy < Ho; ++oy) {
            for (int ox = 0; ox < Wo; ++ox) {
                S acc = bias[f];
                for (int c = 0; c < C; ++c)
                    for (int ky = 0; ky < K; ++ky)
                        for (int kx = 0; kx < K; ++kx) {
                            const int iy = oy * stride + ky - pad;
                            const int ix = ox * stride + kx - pad;
                            if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                            acc += wgt[((static_cast<std::size_t>(f) * C + c) * K + ky) * K + kx] *
                                   in[(static_cast<std::size_t>(c) * H + iy) * W + ix];
                        }
                out[(static_cast<std::size_t>(f) * Ho + oy) * Wo + ox] = acc;
            }
        }
    }
}

template <class S>
void linear_forward(const S* wgt, const S* bias, int rows, int cols, const S* x, S* y) {
    for (int r = 0; r < rows; ++r) {
        S acc = bias[r];
        for (int i = 0; i < cols; ++i) acc += wgt[static_cast<std::size_t>(r) * cols + i] * x[i];
        y[r] = acc;
    }
}

} // namespace gtt::ref

#endif
