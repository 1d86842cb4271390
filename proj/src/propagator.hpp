#pragma once

// RK4 machinery shared by the single-member and ensemble propagators.
//
// Amplitudes are carried in the interaction picture relative to the pulse
// centre t0, a_J(t) = exp(i E_J (t - t0)) c_J(t), so that
//
//   da/dt = i mu E(t) P(t) a,   P = diag(d_J) + q_J exp(-+ i w_J (t - t0)) off-diagonal,
//
// with w_J = E_{J+1} - E_J. For a linear system one RK4 step is the banded
// matrix S = I + (k1 + 2k2 + 2k3 + k4)/6 with k1 = B1, k2 = B2(I + k1/2),
// k3 = B2(I + k2/2), k4 = B3(I + k3) and B_i = h A(t_i). S is applied to
// every member column of a block at once.

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "symtop/pulse.hpp"
#include "symtop/rotor.hpp"

namespace symtop::detail {

inline constexpr int kStepBandwidth = 4;

/// RK4 nodes t0 + k h, k = -half_count..half_count, covering the pulse support.
struct NodeGrid {
    double t0_au = 0.0;
    double h_au = 0.0;
    int half_count = 0;

    double time_au(int k) const { return t0_au + k * h_au; }
    double start_au() const { return time_au(-half_count); }
    double end_au() const { return time_au(half_count); }
    int steps() const { return 2 * half_count; }
};

NodeGrid make_node_grid(const PulseSpec& pulse, double dt_fs, int min_steps);

/// exp(-i w_J s) for a contiguous range of transition frequencies, tabulated at
/// every node and midpoint (s measured from t0).
class PhaseTable {
public:
    PhaseTable(std::span<const double> omega_au, const NodeGrid& grid);

    std::size_t width() const noexcept { return width_; }
    const double* re_at(int half_index) const { return re_.data() + static_cast<std::size_t>(half_index) * width_; }
    const double* im_at(int half_index) const { return im_.data() + static_cast<std::size_t>(half_index) * width_; }

private:
    std::size_t width_;
    std::vector<double> re_;
    std::vector<double> im_;
};

/// One RK4 step in split real/imaginary storage for the column kernel.
struct StepMatrix {
    int n = 0;
    bool identity = true;
    std::vector<double> re;  // (2*kStepBandwidth + 1) diagonals of length n
    std::vector<double> im;

    const double* re_diag(int o) const { return re.data() + static_cast<std::size_t>(o + kStepBandwidth) * n; }
    const double* im_diag(int o) const { return im.data() + static_cast<std::size_t>(o + kStepBandwidth) * n; }
};

/// Builds step matrices for one (K,M) block.
class BlockStepper {
public:
    /// `phases` must cover the block's transitions starting at `phase_offset`.
    BlockStepper(const BlockOperators& block, double dipole_au, const PulseSpec& pulse, const NodeGrid& grid,
                 const PhaseTable& phases, std::size_t phase_offset);

    /// Step from node k to node k + 1.
    void node_step(int k, StepMatrix& out);
    /// Step of length h_au (< grid.h_au) starting at node k.
    void partial_step(int k, double h_au, StepMatrix& out);

    /// exp(-i w_r s) at node k, for the block's transitions.
    void node_phases(int k, std::vector<std::complex<double>>& out) const;

private:
    struct Stage {
        double g = 0.0;  // h * mu * E(t)
        const double* re = nullptr;  // Re exp(-i w s), indexed by transition
        const double* im = nullptr;
    };
    void fill_generator(const Stage& st);
    // k_out = B (I + c k_in), B the current generator, k_in of bandwidth w_in.
    void generator_times(double c, int k_in, int w_in, int k_out);
    void assemble(const Stage& s1, const Stage& s2, const Stage& s3, StepMatrix& out);
    double field_au(double t_au) const;

    const BlockOperators& block_;
    double dipole_au_;
    const PulseSpec& pulse_;
    NodeGrid grid_;
    const PhaseTable& phases_;
    std::size_t offset_;
    int n_;
    std::vector<double> scratch_re_, scratch_im_, scratch2_re_, scratch2_im_;
    std::vector<double> gen_re_, gen_im_;  // diagonals -1, 0, 1 of the generator
    std::vector<double> k_re_, k_im_;      // four stages, (2*kStepBandwidth + 1) diagonals each
};

/// Member amplitude columns of one block, each a unit vector at start.
class ColumnSet {
public:
    static constexpr int kPad = kStepBandwidth;

    ColumnSet(int n, std::span<const int> start_rows);

    int rows() const noexcept { return n_; }
    std::size_t columns() const noexcept { return lo_.size(); }

    void set_column(std::size_t c, std::span<const std::complex<double>> values);
    std::complex<double> get(std::size_t c, int r) const;

    /// a <- S a for every column; supports grow by the bandwidth and are
    /// trimmed where |a|^2 falls below kTrim.
    void apply(const StepMatrix& s);

    /// R_rr += w |a_r|^2 and R_{r+1,r} += w a_{r+1} conj(a_r) over all columns.
    void accumulate_density(std::span<const double> weights, std::vector<double>& r_diag,
                            std::vector<std::complex<double>>& r_off) const;

    /// Same as accumulate_density, for the columns S a (this set is unchanged).
    void accumulate_stepped_density(const StepMatrix& s, std::span<const double> weights, std::vector<double>& r_diag,
                                    std::vector<std::complex<double>>& r_off) const;

    double norm2(std::size_t c) const;
    int support(std::size_t c) const { return hi_[c] - lo_[c] + 1; }

    static constexpr double kTrim = 1e-36;

private:
    // tr/ti <- S a_c over rows [lo, hi], which is returned.
    std::pair<int, int> step_column(std::size_t c, const StepMatrix& s, double* tr, double* ti) const;

    double* re_col(std::size_t c) { return re_.data() + c * stride_ + kPad; }
    double* im_col(std::size_t c) { return im_.data() + c * stride_ + kPad; }
    const double* re_col(std::size_t c) const { return re_.data() + c * stride_ + kPad; }
    const double* im_col(std::size_t c) const { return im_.data() + c * stride_ + kPad; }

    int n_;
    std::size_t stride_;
    std::vector<double> re_, im_;
    std::vector<int> lo_, hi_;
    std::vector<double> tmp_re_, tmp_im_;
};

}  // namespace symtop::detail
