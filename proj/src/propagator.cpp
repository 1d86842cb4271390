#include "propagator.hpp"

#include <algorithm>
#include <cmath>

#include "symtop/error.hpp"
#include "symtop/units.hpp"

namespace symtop::detail {

NodeGrid make_node_grid(const PulseSpec& pulse, double dt_fs, int min_steps) {
    if (!(dt_fs > 0.0)) throw DomainError("propagation dt must be > 0");
    pulse.validate();
    const double half_ps = pulse.support_half_width * pulse.sigma_ps();
    double h_ps = dt_fs * 1e-3;
    if (min_steps > 0 && 2.0 * half_ps / h_ps < min_steps) {
        const double split = std::ceil(min_steps * h_ps / (2.0 * half_ps));
        h_ps /= split;
    }
    NodeGrid grid;
    grid.t0_au = units::ps_to_au(pulse.t0_ps);
    grid.h_au = units::ps_to_au(h_ps);
    grid.half_count = static_cast<int>(std::ceil(half_ps / h_ps - 1e-9));
    return grid;
}

PhaseTable::PhaseTable(std::span<const double> omega_au, const NodeGrid& grid) : width_(omega_au.size()) {
    const int halves = 4 * grid.half_count + 1;
    re_.resize(static_cast<std::size_t>(halves) * width_);
    im_.resize(re_.size());
    for (int m = 0; m < halves; ++m) {
        const double s = (m - 2 * grid.half_count) * 0.5 * grid.h_au;
        double* re = re_.data() + static_cast<std::size_t>(m) * width_;
        double* im = im_.data() + static_cast<std::size_t>(m) * width_;
        for (std::size_t j = 0; j < width_; ++j) {
            const double phase = omega_au[j] * s;
            re[j] = std::cos(phase);
            im[j] = -std::sin(phase);
        }
    }
}

BlockStepper::BlockStepper(const BlockOperators& block, double dipole_au, const PulseSpec& pulse,
                           const NodeGrid& grid, const PhaseTable& phases, std::size_t phase_offset)
    : block_(block),
      dipole_au_(dipole_au),
      pulse_(pulse),
      grid_(grid),
      phases_(phases),
      offset_(phase_offset),
      n_(static_cast<int>(block.size())) {
    if (n_ > 1 && phase_offset + block.coupling.size() > phases.width()) {
        throw DomainError("phase table does not cover the block transitions");
    }
    scratch_re_.resize(block.coupling.size());
    scratch_im_.resize(block.coupling.size());
    scratch2_re_.resize(block.coupling.size());
    scratch2_im_.resize(block.coupling.size());
    gen_re_.resize(3 * static_cast<std::size_t>(n_));
    gen_im_.resize(gen_re_.size());
    k_re_.resize(4 * static_cast<std::size_t>(2 * kStepBandwidth + 1) * n_);
    k_im_.resize(k_re_.size());
}

double BlockStepper::field_au(double t_au) const {
    return field_at(pulse_, units::au_to_ps(t_au)) / units::kV_per_cm_per_au_field;
}

void BlockStepper::fill_generator(const Stage& st) {
    const int n = n_;
    double* lre = gen_re_.data();
    double* lim = gen_im_.data();
    double* dre = lre + n;
    double* dim = lim + n;
    double* ure = dre + n;
    double* uim = dim + n;
    const double g = st.g;
    for (int r = 0; r < n; ++r) {
        dre[r] = 0.0;
        dim[r] = g * block_.diagonal[r];
    }
    lre[0] = lim[0] = 0.0;
    ure[n - 1] = uim[n - 1] = 0.0;
    for (int r = 0; r + 1 < n; ++r) {
        const double gq = g * block_.coupling[r];
        const double zr = st.re[r];
        const double zi = st.im[r];
        ure[r] = -gq * zi;  // i g q z
        uim[r] = gq * zr;
        lre[r + 1] = gq * zi;  // i g q conj(z)
        lim[r + 1] = gq * zr;
    }
}

void BlockStepper::generator_times(double c, int k_in, int w_in, int k_out) {
    constexpr int w = kStepBandwidth;
    const int n = n_;
    const std::size_t slab = static_cast<std::size_t>(2 * w + 1) * n;
    double* ore = k_re_.data() + k_out * slab;
    double* oim = k_im_.data() + k_out * slab;
    std::fill(ore, ore + slab, 0.0);
    std::fill(oim, oim + slab, 0.0);
    for (int p = -1; p <= 1; ++p) {
        const double* __restrict bre = gen_re_.data() + static_cast<std::size_t>(p + 1) * n;
        const double* __restrict bim = gen_im_.data() + static_cast<std::size_t>(p + 1) * n;
        double* __restrict dre = ore + static_cast<std::size_t>(p + w) * n;
        double* __restrict dim = oim + static_cast<std::size_t>(p + w) * n;
        for (int r = 0; r < n; ++r) {
            dre[r] += bre[r];
            dim[r] += bim[r];
        }
        if (k_in < 0) continue;
        const double* kre = k_re_.data() + k_in * slab;
        const double* kim = k_im_.data() + k_in * slab;
        for (int q = -w_in; q <= w_in; ++q) {
            const int o = p + q;
            // out(r, r+o) += c B(r, r+p) K(r+p, r+o)
            const double* __restrict xre = kre + static_cast<std::size_t>(q + w) * n + p;
            const double* __restrict xim = kim + static_cast<std::size_t>(q + w) * n + p;
            double* __restrict yre = ore + static_cast<std::size_t>(o + w) * n;
            double* __restrict yim = oim + static_cast<std::size_t>(o + w) * n;
            const int lo = std::max({0, -p, -o});
            const int hi = std::min({n - 1, n - 1 - p, n - 1 - o});
            for (int r = lo; r <= hi; ++r) {
                yre[r] += c * (bre[r] * xre[r] - bim[r] * xim[r]);
                yim[r] += c * (bre[r] * xim[r] + bim[r] * xre[r]);
            }
        }
    }
}

void BlockStepper::assemble(const Stage& s1, const Stage& s2, const Stage& s3, StepMatrix& out) {
    constexpr int w = kStepBandwidth;
    const std::size_t slab = static_cast<std::size_t>(2 * w + 1) * n_;
    out.n = n_;
    out.re.assign(slab, 0.0);
    out.im.assign(slab, 0.0);
    for (int r = 0; r < n_; ++r) out.re[static_cast<std::size_t>(w) * n_ + r] = 1.0;
    out.identity = (s1.g == 0.0 && s2.g == 0.0 && s3.g == 0.0);
    if (out.identity) return;

    fill_generator(s1);
    generator_times(0.0, -1, 0, 0);  // k1 = B1
    fill_generator(s2);
    generator_times(0.5, 0, 1, 1);  // k2 = B2 (I + k1/2)
    generator_times(0.5, 1, 2, 2);  // k3 = B2 (I + k2/2)
    fill_generator(s3);
    generator_times(1.0, 2, 3, 3);  // k4 = B3 (I + k3)

    constexpr double sixth = 1.0 / 6.0;
    const double coef[4] = {sixth, 2.0 * sixth, 2.0 * sixth, sixth};
    for (int k = 0; k < 4; ++k) {
        const double* kre = k_re_.data() + k * slab;
        const double* kim = k_im_.data() + k * slab;
        for (std::size_t i = 0; i < slab; ++i) {
            out.re[i] += coef[k] * kre[i];
            out.im[i] += coef[k] * kim[i];
        }
    }
}

void BlockStepper::node_step(int k, StepMatrix& out) {
    const double h = grid_.h_au;
    const double t = grid_.time_au(k);
    const int m = 2 * (k + grid_.half_count);
    const Stage s1{h * dipole_au_ * field_au(t), phases_.re_at(m) + offset_, phases_.im_at(m) + offset_};
    const Stage s2{h * dipole_au_ * field_au(t + 0.5 * h), phases_.re_at(m + 1) + offset_,
                   phases_.im_at(m + 1) + offset_};
    const Stage s3{h * dipole_au_ * field_au(t + h), phases_.re_at(m + 2) + offset_,
                   phases_.im_at(m + 2) + offset_};
    assemble(s1, s2, s3, out);
}

void BlockStepper::partial_step(int k, double h, StepMatrix& out) {
    const double t = grid_.time_au(k);
    const double s = t - grid_.t0_au;
    const int m = 2 * (k + grid_.half_count);
    for (std::size_t j = 0; j < block_.coupling.size(); ++j) {
        const double omega = block_.energies[j + 1] - block_.energies[j];
        scratch_re_[j] = std::cos(omega * (s + 0.5 * h));
        scratch_im_[j] = -std::sin(omega * (s + 0.5 * h));
        scratch2_re_[j] = std::cos(omega * (s + h));
        scratch2_im_[j] = -std::sin(omega * (s + h));
    }
    const Stage s1{h * dipole_au_ * field_au(t), phases_.re_at(m) + offset_, phases_.im_at(m) + offset_};
    const Stage s2{h * dipole_au_ * field_au(t + 0.5 * h), scratch_re_.data(), scratch_im_.data()};
    const Stage s3{h * dipole_au_ * field_au(t + h), scratch2_re_.data(), scratch2_im_.data()};
    assemble(s1, s2, s3, out);
}

void BlockStepper::node_phases(int k, std::vector<std::complex<double>>& out) const {
    const int m = 2 * (k + grid_.half_count);
    out.resize(block_.coupling.size());
    const double* re = phases_.re_at(m) + offset_;
    const double* im = phases_.im_at(m) + offset_;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = {re[j], im[j]};
}

ColumnSet::ColumnSet(int n, std::span<const int> start_rows)
    : n_(n), stride_(static_cast<std::size_t>(n) + 2 * kPad) {
    re_.assign(stride_ * start_rows.size(), 0.0);
    im_.assign(re_.size(), 0.0);
    lo_.resize(start_rows.size());
    hi_.resize(start_rows.size());
    for (std::size_t c = 0; c < start_rows.size(); ++c) {
        const int r = start_rows[c];
        if (r < 0 || r >= n) throw DomainError("column start row outside block");
        re_col(c)[r] = 1.0;
        lo_[c] = hi_[c] = r;
    }
    tmp_re_.assign(stride_, 0.0);
    tmp_im_.assign(stride_, 0.0);
}

void ColumnSet::set_column(std::size_t c, std::span<const std::complex<double>> values) {
    double* re = re_col(c);
    double* im = im_col(c);
    int lo = n_, hi = -1;
    for (int r = 0; r < n_; ++r) {
        re[r] = values[r].real();
        im[r] = values[r].imag();
        if (values[r] != 0.0) {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    if (hi < 0) lo = hi = 0;
    lo_[c] = lo;
    hi_[c] = hi;
}

std::complex<double> ColumnSet::get(std::size_t c, int r) const { return {re_col(c)[r], im_col(c)[r]}; }

std::pair<int, int> ColumnSet::step_column(std::size_t c, const StepMatrix& s, double* __restrict tr,
                                           double* __restrict ti) const {
    constexpr int w = kStepBandwidth;
    const double* __restrict are = re_col(c);
    const double* __restrict aim = im_col(c);
    const int lo = std::max(0, lo_[c] - w);
    const int hi = std::min(n_ - 1, hi_[c] + w);
    for (int r = lo; r <= hi; ++r) tr[r] = ti[r] = 0.0;
    for (int o = -w; o <= w; ++o) {
        const double* __restrict sr = s.re_diag(o);
        const double* __restrict si = s.im_diag(o);
        const double* __restrict xr = are + o;
        const double* __restrict xi = aim + o;
        for (int r = lo; r <= hi; ++r) {
            tr[r] += sr[r] * xr[r] - si[r] * xi[r];
            ti[r] += sr[r] * xi[r] + si[r] * xr[r];
        }
    }
    return {lo, hi};
}

void ColumnSet::apply(const StepMatrix& s) {
    if (s.identity) return;
    double* tr = tmp_re_.data();
    double* ti = tmp_im_.data();
    for (std::size_t c = 0; c < columns(); ++c) {
        const auto [lo, hi] = step_column(c, s, tr, ti);
        int new_lo = lo, new_hi = hi;
        while (new_lo < new_hi && tr[new_lo] * tr[new_lo] + ti[new_lo] * ti[new_lo] < kTrim) {
            tr[new_lo] = ti[new_lo] = 0.0;
            ++new_lo;
        }
        while (new_hi > new_lo && tr[new_hi] * tr[new_hi] + ti[new_hi] * ti[new_hi] < kTrim) {
            tr[new_hi] = ti[new_hi] = 0.0;
            --new_hi;
        }
        std::copy(tr + lo, tr + hi + 1, re_col(c) + lo);
        std::copy(ti + lo, ti + hi + 1, im_col(c) + lo);
        lo_[c] = new_lo;
        hi_[c] = new_hi;
    }
}

void ColumnSet::accumulate_stepped_density(const StepMatrix& s, std::span<const double> weights,
                                           std::vector<double>& r_diag,
                                           std::vector<std::complex<double>>& r_off) const {
    if (s.identity) {
        accumulate_density(weights, r_diag, r_off);
        return;
    }
    std::vector<double> tr(stride_), ti(stride_);
    for (std::size_t c = 0; c < columns(); ++c) {
        const auto [lo, hi] = step_column(c, s, tr.data(), ti.data());
        const double w = weights[c];
        for (int r = lo; r <= hi; ++r) r_diag[r] += w * (tr[r] * tr[r] + ti[r] * ti[r]);
        for (int r = lo; r < hi; ++r) {
            const double pr = tr[r + 1] * tr[r] + ti[r + 1] * ti[r];
            const double pi = ti[r + 1] * tr[r] - tr[r + 1] * ti[r];
            r_off[r] += std::complex<double>(w * pr, w * pi);
        }
    }
}

void ColumnSet::accumulate_density(std::span<const double> weights, std::vector<double>& r_diag,
                                   std::vector<std::complex<double>>& r_off) const {
    for (std::size_t c = 0; c < columns(); ++c) {
        const double w = weights[c];
        const double* re = re_col(c);
        const double* im = im_col(c);
        for (int r = lo_[c]; r <= hi_[c]; ++r) r_diag[r] += w * (re[r] * re[r] + im[r] * im[r]);
        for (int r = lo_[c]; r < hi_[c]; ++r) {
            // a_{r+1} conj(a_r)
            const double pr = re[r + 1] * re[r] + im[r + 1] * im[r];
            const double pi = im[r + 1] * re[r] - re[r + 1] * im[r];
            r_off[r] += std::complex<double>(w * pr, w * pi);
        }
    }
}

double ColumnSet::norm2(std::size_t c) const {
    const double* re = re_col(c);
    const double* im = im_col(c);
    double s = 0.0;
    for (int r = lo_[c]; r <= hi_[c]; ++r) s += re[r] * re[r] + im[r] * im[r];
    return s;
}

}  // namespace symtop::detail
