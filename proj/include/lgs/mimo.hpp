#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "lgs/decoder.hpp"

namespace lgs {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

struct MimoConfig {
    int n_antennas = 4;     // complex dimension
    int qam_order = 16;     // square QAM, power of 4
    std::vector<double> ebn0_db = {15.0};
    long frames = 1000;
    long moves = 20;
    int trials_k = 1;
    bool use_lll = false;
    uint64_t seed = 1;

    // noise variance per real dimension, from Eb/N0 = n / (log2(M) sigma_w^2)
    double noise_var(double ebn0) const {
        return static_cast<double>(n_antennas) /
               (std::log2(static_cast<double>(qam_order)) * std::pow(10.0, ebn0 / 10.0));
    }

    void validate() const {
        if (n_antennas < 1) throw std::invalid_argument("MimoConfig: n_antennas must be >= 1");
        int m = qam_order;
        bool pow4 = m >= 4;
        while (pow4 && m > 1) {
            if (m % 4 != 0 && m != 1) pow4 = false;
            m /= 4;
        }
        if (!pow4) throw std::invalid_argument("MimoConfig: qam_order must be a power of 4");
        if (frames < 1) throw std::invalid_argument("MimoConfig: frames must be >= 1");
        if (moves < 1) throw std::invalid_argument("MimoConfig: moves must be >= 1");
        if (trials_k < 1) throw std::invalid_argument("MimoConfig: trials_k must be >= 1");
        if (ebn0_db.empty()) throw std::invalid_argument("MimoConfig: ebn0_db must be nonempty");
    }
};

// --- Gray-mapped square QAM ----------------------------------------------

// Per-axis levels u in [0, L-1] carry the Gray label u ^ (u >> 1); the
// amplitude of level u is (2u - (L-1)) * scale with scale normalizing the
// constellation to unit average symbol energy.
struct QamMap {
    int M;
    int L;              // levels per axis = sqrt(M)
    int bits_per_axis;  // log2(L)
    double scale;
};

inline QamMap make_qam(int M) {
    int L = static_cast<int>(std::lround(std::sqrt(static_cast<double>(M))));
    if (L * L != M || M < 4) throw std::invalid_argument("make_qam: M must be a square power of 4");
    int b = 0;
    while ((1 << b) < L) ++b;
    if ((1 << b) != L) throw std::invalid_argument("make_qam: sqrt(M) must be a power of 2");
    // average symbol energy of the odd-integer grid is 2(L^2-1)/3
    double energy = 2.0 * (static_cast<double>(L) * L - 1.0) / 3.0;
    return QamMap{M, L, b, 1.0 / std::sqrt(energy)};
}

inline int gray_encode(int u) { return u ^ (u >> 1); }

inline int gray_decode(int g) {
    int u = g;
    for (int shift = 1; shift < 16; shift <<= 1) u ^= u >> shift;
    return u;
}

inline double qam_axis_amplitude(const QamMap& qam, int level) {
    return (2.0 * level - (qam.L - 1)) * qam.scale;
}

inline int qam_nearest_level(const QamMap& qam, double amplitude) {
    int u = static_cast<int>(std::lround((amplitude / qam.scale + (qam.L - 1)) / 2.0));
    return std::clamp(u, 0, qam.L - 1);
}

// bits (I bits then Q bits per symbol, MSB first) -> unit-energy symbols
inline VectorXcd qam_modulate(const std::vector<int>& bits, const QamMap& qam) {
    const int bps = 2 * qam.bits_per_axis;
    if (bits.size() % bps != 0)
        throw std::invalid_argument("qam_modulate: bit count not divisible by log2(M)");
    const int ns = static_cast<int>(bits.size()) / bps;
    VectorXcd out(ns);
    for (int s = 0; s < ns; ++s) {
        int gi = 0, gq = 0;
        for (int b = 0; b < qam.bits_per_axis; ++b) gi = (gi << 1) | bits[s * bps + b];
        for (int b = 0; b < qam.bits_per_axis; ++b)
            gq = (gq << 1) | bits[s * bps + qam.bits_per_axis + b];
        out(s) = {qam_axis_amplitude(qam, gray_decode(gi)),
                  qam_axis_amplitude(qam, gray_decode(gq))};
    }
    return out;
}

inline std::vector<int> qam_demodulate(const VectorXcd& symbols, const QamMap& qam) {
    std::vector<int> bits;
    bits.reserve(symbols.size() * 2 * qam.bits_per_axis);
    for (Eigen::Index s = 0; s < symbols.size(); ++s) {
        int gi = gray_encode(qam_nearest_level(qam, symbols(s).real()));
        int gq = gray_encode(qam_nearest_level(qam, symbols(s).imag()));
        for (int b = qam.bits_per_axis - 1; b >= 0; --b) bits.push_back((gi >> b) & 1);
        for (int b = qam.bits_per_axis - 1; b >= 0; --b) bits.push_back((gq >> b) & 1);
    }
    return bits;
}

inline std::vector<int> qam_levels_to_bits(const VectorXi& levels, const QamMap& qam) {
    // levels holds the 2n per-axis integers, I block then Q block
    const int n = static_cast<int>(levels.size()) / 2;
    std::vector<int> bits;
    bits.reserve(2 * n * qam.bits_per_axis);
    for (int s = 0; s < n; ++s) {
        int gi = gray_encode(std::clamp(levels(s), 0, qam.L - 1));
        int gq = gray_encode(std::clamp(levels(s + n), 0, qam.L - 1));
        for (int b = qam.bits_per_axis - 1; b >= 0; --b) bits.push_back((gi >> b) & 1);
        for (int b = qam.bits_per_axis - 1; b >= 0; --b) bits.push_back((gq >> b) & 1);
    }
    return bits;
}

// --- complex-to-real lattice embedding -------------------------------------

struct ComplexChannel {
    MatrixXcd H;
    MatrixXd B_real;  // [[Re H, -Im H], [Im H, Re H]]
};

inline MatrixXd embed_real(const MatrixXcd& H) {
    const int n = static_cast<int>(H.rows());
    MatrixXd B(2 * n, 2 * n);
    B.topLeftCorner(n, n) = H.real();
    B.topRightCorner(n, n) = -H.imag();
    B.bottomLeftCorner(n, n) = H.imag();
    B.bottomRightCorner(n, n) = H.real();
    return B;
}

inline ComplexChannel make_channel(int n, Rng& rng) {
    MatrixXcd H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            H(i, j) = std::complex<double>(rng.gauss() * M_SQRT1_2, rng.gauss() * M_SQRT1_2);
    return ComplexChannel{H, embed_real(H)};
}

inline VectorXd embed_vector(const VectorXcd& v) {
    const int n = static_cast<int>(v.size());
    VectorXd out(2 * n);
    out.head(n) = v.real();
    out.tail(n) = v.imag();
    return out;
}

// Affine change of variables mapping per-axis constellation levels
// u in {0..L-1}^{2n} onto the integer lattice: the amplitudes are
// 2*scale*u - scale*(L-1), so  c = B_real x + w  becomes
// c + scale*(L-1)*B_real*1 = (2*scale*B_real) u + w.
struct LatticeInstance {
    Basis basis;     // 2*scale * B_real
    VectorXd c_lat;  // shifted receive vector
};

inline LatticeInstance embed_constellation(const MatrixXd& B_real, const VectorXd& c_real,
                                           const QamMap& qam) {
    const double s = qam.scale;
    MatrixXd B_lat = 2.0 * s * B_real;
    VectorXd shift = s * (qam.L - 1) * (B_real * VectorXd::Ones(B_real.cols()));
    return LatticeInstance{make_basis(B_lat), c_real + shift};
}

// --- detectors -------------------------------------------------------------

enum class Detector { ZF, Gibbs, MHK, MTMK };

struct DetectorSpec {
    Detector kind = Detector::MHK;
    bool use_lll = false;
    int k = 1;
    std::string label() const {
        switch (kind) {
            case Detector::ZF: return "zf";
            case Detector::Gibbs: return "gibbs";
            case Detector::MHK: return "mhk";
            case Detector::MTMK: return "mtmk";
        }
        return "?";
    }
};

struct DetectOutcome {
    VectorXi levels;           // 2n per-axis decisions in [0, L-1]
    double acceptance = 1.0;
};

inline VectorXi clip_levels(const VectorXi& u, const QamMap& qam) {
    VectorXi out = u;
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = std::clamp(out(i), 0, qam.L - 1);
    return out;
}

// The sampler detectors run unconstrained over Z^{2n}; the final answer is
// clipped per coordinate onto the constellation. The sampling sigma comes
// from the (possibly reduced) lattice, never from the noise level, which
// stalls at high SNR.
inline DetectOutcome detect(const ComplexChannel& ch, const VectorXcd& received,
                            const DetectorSpec& det, const QamMap& qam, long moves,
                            uint64_t seed) {
    const VectorXd c_real = embed_vector(received);
    if (det.kind == Detector::ZF) {
        VectorXcd xhat = ch.H.colPivHouseholderQr().solve(received);
        const int n = static_cast<int>(xhat.size());
        VectorXi levels(2 * n);
        for (int i = 0; i < n; ++i) {
            levels(i) = qam_nearest_level(qam, xhat(i).real());
            levels(i + n) = qam_nearest_level(qam, xhat(i).imag());
        }
        return DetectOutcome{levels, 1.0};
    }

    LatticeInstance inst = embed_constellation(ch.B_real, c_real, qam);
    if (det.kind == Detector::MHK || det.kind == Detector::MTMK) {
        DecodeConfig cfg;
        cfg.moves = moves;
        cfg.trials_k = det.kind == Detector::MTMK ? det.k : 1;
        cfg.use_lll = det.use_lll;
        cfg.seed = seed;
        DecodeResult res = decode_cvp(inst.basis, inst.c_lat, cfg);
        return DetectOutcome{clip_levels(res.x_cvp, qam), res.acceptance_rate};
    }

    // Gibbs: argmin tracking over full scans of the exact conditionals.
    Basis work = inst.basis;
    IntMatrix U;
    if (det.use_lll) {
        auto red = lll_reduce(inst.basis);
        work = std::move(red.basis);
        U = std::move(red.U);
    }
    const double sigma = sigma_default(work);
    GibbsSampler g = make_gibbs_sampler(work, make_gaussian_spec(sigma, inst.c_lat));
    LatticePoint x0 = babai_round(work, inst.c_lat);
    VectorXi best = x0.x;
    double best_d = (x0.embedded - inst.c_lat).norm();
    Rng rng(seed);
    run_chain(g, x0.x, moves, rng, [&](const ChainState& st, bool) {
        const double d = sigma * std::sqrt(std::max(0.0, -2.0 * st.log_pi_unnorm));
        if (d < best_d - 1e-12) {
            best_d = d;
            best = st.x;
        }
    });
    if (det.use_lll) {
        Eigen::Matrix<int64_t, Eigen::Dynamic, 1> back = U * best.cast<int64_t>();
        best = back.cast<int>();
    }
    return DetectOutcome{clip_levels(best, qam), 1.0};
}

// --- BER sweep --------------------------------------------------------------

struct SimRow {
    double ebn0_db = 0.0;
    std::string detector;
    bool use_lll = false;
    long moves = 0;
    int k = 1;
    long frames = 0;
    long bit_errors = 0;
    long bits_total = 0;
    double ber = 0.0;
    double mean_acceptance = 1.0;
    std::vector<long> per_frame_errors;  // for paired-difference statistics
};

struct SimResult {
    std::vector<SimRow> rows;
};

namespace detail {

constexpr uint64_t kTagFrame = 0x6672616dull;     // frame data stream
constexpr uint64_t kTagDetector = 0x64657465ull;  // per-detector chain stream

struct FrameData {
    ComplexChannel ch;
    std::vector<int> bits;
    VectorXcd tx;
    VectorXcd rx;
    VectorXd w_real;
};

// Channels, bits, and noise depend only on (seed, snr index, frame index):
// every detector in the sweep sees identical frames.
inline FrameData make_frame(const MimoConfig& cfg, const QamMap& qam, int snr_idx, long frame,
                            double sigma_w) {
    Rng rng = Rng::derive(cfg.seed, {kTagFrame, static_cast<uint64_t>(snr_idx),
                                     static_cast<uint64_t>(frame)});
    FrameData fd;
    fd.ch = make_channel(cfg.n_antennas, rng);
    const int nbits = cfg.n_antennas * 2 * qam.bits_per_axis;
    fd.bits.resize(nbits);
    for (int i = 0; i < nbits; ++i) fd.bits[i] = static_cast<int>(rng.bits() & 1ull);
    fd.tx = qam_modulate(fd.bits, qam);
    fd.w_real.resize(2 * cfg.n_antennas);
    for (int i = 0; i < 2 * cfg.n_antennas; ++i) fd.w_real(i) = sigma_w * rng.gauss();
    VectorXcd w(cfg.n_antennas);
    for (int i = 0; i < cfg.n_antennas; ++i)
        w(i) = {fd.w_real(i), fd.w_real(i + cfg.n_antennas)};
    fd.rx = fd.ch.H * fd.tx + w;
    return fd;
}

}  // namespace detail

inline SimResult run_ber_sweep(const MimoConfig& cfg, const std::vector<DetectorSpec>& dets) {
    cfg.validate();
    const QamMap qam = make_qam(cfg.qam_order);
    SimResult out;
    for (int si = 0; si < static_cast<int>(cfg.ebn0_db.size()); ++si) {
        const double ebn0 = cfg.ebn0_db[si];
        const double sigma_w = std::sqrt(cfg.noise_var(ebn0));
        std::vector<SimRow> rows(dets.size());
        for (size_t d = 0; d < dets.size(); ++d) {
            rows[d].ebn0_db = ebn0;
            rows[d].detector = dets[d].label();
            rows[d].use_lll = dets[d].use_lll;
            rows[d].moves = cfg.moves;
            rows[d].k = dets[d].kind == Detector::MTMK ? dets[d].k : 1;
            rows[d].frames = cfg.frames;
            rows[d].mean_acceptance = 0.0;
            rows[d].per_frame_errors.reserve(cfg.frames);
        }
        for (long f = 0; f < cfg.frames; ++f) {
            detail::FrameData fd = detail::make_frame(cfg, qam, si, f, sigma_w);
            for (size_t d = 0; d < dets.size(); ++d) {
                const uint64_t det_seed =
                    Rng::derive_seed(cfg.seed, {detail::kTagDetector, static_cast<uint64_t>(si),
                                                static_cast<uint64_t>(f), static_cast<uint64_t>(d)});
                DetectOutcome res = detect(fd.ch, fd.rx, dets[d], qam, cfg.moves, det_seed);
                std::vector<int> bits = qam_levels_to_bits(res.levels, qam);
                long errs = 0;
                for (size_t b = 0; b < bits.size(); ++b) errs += bits[b] != fd.bits[b];
                rows[d].bit_errors += errs;
                rows[d].per_frame_errors.push_back(errs);
                rows[d].mean_acceptance += res.acceptance;
            }
        }
        for (size_t d = 0; d < dets.size(); ++d) {
            rows[d].bits_total = cfg.frames * cfg.n_antennas * 2 * qam.bits_per_axis;
            rows[d].ber = static_cast<double>(rows[d].bit_errors) /
                          static_cast<double>(rows[d].bits_total);
            rows[d].mean_acceptance /= static_cast<double>(cfg.frames);
            out.rows.push_back(std::move(rows[d]));
        }
    }
    return out;
}

// Mean ||Bx - c||^2 at the transmitted point (= ||w||^2) per frame, with
// its Monte-Carlo standard error; expect 2n * sigma_w^2.
struct NoiseCalibration {
    double mean = 0.0;
    double stderr_mean = 0.0;
    double expected = 0.0;
};

inline NoiseCalibration noise_calibration(const MimoConfig& cfg, int snr_idx) {
    const QamMap qam = make_qam(cfg.qam_order);
    const double ebn0 = cfg.ebn0_db.at(snr_idx);
    const double sigma_w = std::sqrt(cfg.noise_var(ebn0));
    double sum = 0.0, sum_sq = 0.0;
    for (long f = 0; f < cfg.frames; ++f) {
        detail::FrameData fd = detail::make_frame(cfg, qam, snr_idx, f, sigma_w);
        const double v = (fd.rx - fd.ch.H * fd.tx).squaredNorm();
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / cfg.frames;
    const double var = std::max(0.0, sum_sq / cfg.frames - mean * mean);
    return NoiseCalibration{mean, std::sqrt(var / cfg.frames),
                            2.0 * cfg.n_antennas * sigma_w * sigma_w};
}

// --- soft output -------------------------------------------------------------

// Approximate per-bit LLRs from a list of integer candidates: each sample
// is clipped onto the constellation, duplicates collapse, and the ratio
// of summed likelihoods of the bit classes is formed in the log domain.
// A one-sided class clamps to +-50.
inline VectorXd llr_compute(const std::vector<VectorXi>& samples, const ComplexChannel& ch,
                            const VectorXcd& received, double sigma, const QamMap& qam) {
    if (samples.empty()) throw std::invalid_argument("llr_compute: empty sample list");
    const double clamp = 50.0;
    const VectorXd c_real = embed_vector(received);
    const int n2 = static_cast<int>(samples.front().size());
    const int n = n2 / 2;
    const int nbits = n * 2 * qam.bits_per_axis;

    std::vector<VectorXi> uniq;
    std::vector<std::vector<int>> bit_table;
    std::vector<double> loglik;
    for (const auto& raw : samples) {
        VectorXi u = clip_levels(raw, qam);
        bool seen = false;
        for (const auto& v : uniq)
            if (v == u) { seen = true; break; }
        if (seen) continue;
        VectorXd amp(n2);
        for (int i = 0; i < n2; ++i) amp(i) = qam_axis_amplitude(qam, u(i));
        const double d2 = (ch.B_real * amp - c_real).squaredNorm();
        uniq.push_back(u);
        bit_table.push_back(qam_levels_to_bits(u, qam));
        loglik.push_back(-d2 / (2.0 * sigma * sigma));
    }

    VectorXd llr(nbits);
    for (int b = 0; b < nbits; ++b) {
        std::vector<double> ones, zeros;
        for (size_t s = 0; s < uniq.size(); ++s)
            (bit_table[s][b] ? ones : zeros).push_back(loglik[s]);
        if (ones.empty()) {
            llr(b) = -clamp;
        } else if (zeros.empty()) {
            llr(b) = clamp;
        } else {
            llr(b) = logsumexp(ones) - logsumexp(zeros);
        }
    }
    return llr;
}

}  // namespace lgs
