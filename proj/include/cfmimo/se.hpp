// SPDX-License-Identifier: Apache-2.0
//
// cfmimo - cell-free massive MIMO downlink analysis library
// Copyright (C) 2026 The cfmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CFMIMO_SE_HPP
#define CFMIMO_SE_HPP

#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/estimation.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo::se
{
    struct SEReport
    {
        std::vector<double> per_user_bits;
        double prelog = 1.0;
        Protocol protocol = Protocol::p1_closed_form;
    };

    /// 1 - tau_u / tau_c
    double prelog_p1(int tau_u, int tau_c);
    /// 1 - (tau_u + tau_d) / tau_c
    double prelog_p2(int tau_u, int tau_d, int tau_c);

    /// log2 det of a Hermitian positive definite matrix; throws NotPositiveDefinite.
    double log2det_hpd(const CMatrix &x);

    /// log2|I + rho m^H psi^-1 m| for a positive definite noise covariance psi.
    double log_det_rate(const CMatrix &mean, const CMatrix &psi, double rho);

    /// prelog * log2|I + rho m^H (Psi^a)^-1 m| with Psi^a = I + rho S - rho m m^H.
    /// Throws NotPositiveDefinite when the minimum eigenvalue of Psi^a is below 1e-10.
    double se_generic(const CMatrix &cond_mean, const CMatrix &cond_second_moment_sum, double prelog, double rho);

    /// How the intra-AP expectation E{G^H G B G^H G} enters the closed form.
    enum class IntraApTerm
    {
        exact,  // beta^2 (L^2 B + L Tr(B) I); valid for any pilot book
        printed // L beta^2 C with diagonal C_ii = Tr(B) + L b_ii; equal to exact when B is diagonal
    };

    struct ClosedFormPieces
    {
        std::vector<CMatrix> d_bar; // K, N x N
        std::vector<CMatrix> psi_b; // K, N x N, Hermitian positive definite

        // Individual contributions to rho E{sum_k' D_kk' D_kk'^H}; psi_b = I + t11 + t12 + t13 + t2 - rho d_bar d_bar^H
        std::vector<CMatrix> t11; // pilot contamination trace term
        std::vector<CMatrix> t12; // intra-AP term
        std::vector<CMatrix> t13; // uplink noise term
        std::vector<CMatrix> t2;  // coherent cross-AP term

        // Optional per-(m,k,k') matrices, index (m*K + k)*K + k'
        std::vector<CMatrix> b;
        std::vector<CMatrix> c_diag;
    };

    struct ClosedFormResult
    {
        SEReport report;
        ClosedFormPieces pieces;
    };

    struct ClosedFormOptions
    {
        IntraApTerm intra_ap = IntraApTerm::exact;
        bool keep_b_matrices = false;
    };

    /// Protocol 1 SE with statistical CSI, any pilot book.
    ClosedFormResult closed_form_p1(const RMatrix &beta, const channel::PilotBook &book,
                                    const estimation::UplinkStatistics &stats, const RMatrix &eta, int L,
                                    double prelog, double rho, const ClosedFormOptions &options = {});

    /// Per-stream SINRs of the linear MMSE detector for a mean channel m and effective noise psi.
    std::vector<double> mmse_stream_sinr(const CMatrix &mean, const CMatrix &psi, double rho,
                                         MmseForm form = MmseForm::standard);

    SEReport se_linear_mmse_p1(const ClosedFormPieces &pieces, double prelog, double rho,
                               MmseForm form = MmseForm::standard);

    /// Diagonal of sum_k' Dvar_kk' per user, stacked (K*N): row sums of the error-variance table.
    RVector error_variance_rows(const RMatrix &err_var, int K, int N);

    /// One realization, Protocol 2 with SIC. `err_rows` from error_variance_rows.
    std::vector<double> se_p2_sic(const estimation::EffectiveChannelEstimates &est, double prelog, double rho);
    void se_p2_sic_into(const CMatrix &d_hat, const RVector &err_rows, int K, int N, double prelog, double rho,
                        std::vector<double> &out);

    std::vector<double> se_linear_mmse_p2(const estimation::EffectiveChannelEstimates &est, double prelog,
                                          double rho, MmseForm form = MmseForm::standard);
    void se_linear_mmse_p2_into(const CMatrix &d_hat, const RVector &err_rows, int K, int N, double prelog,
                                double rho, MmseForm form, std::vector<double> &out);

    /// One realization with perfect CSI at the users.
    std::vector<double> se_perfect_csi(const EffectiveChannels &eff, double prelog, double rho);
    void se_perfect_csi_into(const CMatrix &d, int K, int N, double prelog, double rho, std::vector<double> &out);

    /// Single-antenna approximation of the perfect CSI SE. beta, gamma, varsigma are M x K.
    std::vector<double> se_up_approx(const RMatrix &beta, const RMatrix &gamma, const RMatrix &varsigma,
                                     double rho, double prelog, int L = 1, int N = 1);

    /// Running moments of D for the statistical-CSI bound evaluated by simulation.
    class StatisticalMoments
    {
    public:
        StatisticalMoments(int K, int N, int n_batches, int n_realizations);

        void add(const CMatrix &d); // realizations must arrive in order
        int count() const { return count_; }

        /// Per-user SE from all realizations.
        std::vector<double> se(double prelog, double rho) const;
        /// Jackknife standard error per user over batches.
        std::vector<double> standard_error(double prelog, double rho) const;

    private:
        struct Sums
        {
            std::vector<CMatrix> mean;   // sum of D_kk
            std::vector<CMatrix> second; // sum of sum_k' D_kk' D_kk'^H
            int n = 0;
        };
        Sums total() const;
        std::vector<double> se_of(const Sums &s, double prelog, double rho) const;

        int K_, N_, n_batches_, per_batch_;
        int count_ = 0;
        std::vector<Sums> batches_;
    };

    /// Entry laws of the effective channel in the large-M limit, stacked like D.
    struct Lemma3Params
    {
        int K = 0, N = 0;
        RMatrix mean;     // real mean (non-zero only on own-user diagonals)
        RMatrix variance; // own diagonal: variance of the real part; other entries: complex variance
        bool is_real_entry(int k, int kp, int i, int j) const { return k == kp && i == j; }
    };

    Lemma3Params lemma3_params(const RMatrix &eta, const RMatrix &beta, const estimation::UplinkStatistics &stats,
                               int L);

    /// Diagonal matrix with entries Tr(C E{b_k b_k^H}).
    CMatrix lemma4_oracle(const CMatrix &c, const std::vector<CMatrix> &column_covariances);

    /// E{b_k b_k^H} = M I_N for B = Y^H X with X, Y i.i.d. M x N standard complex Gaussian.
    std::vector<CMatrix> lemma4_column_covariances(int M, int N);
}

#endif
