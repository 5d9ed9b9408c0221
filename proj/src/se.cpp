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

#include "cfmimo/se.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "cfmimo/stats.hpp"

namespace cfmimo::se
{
    double prelog_p1(int tau_u, int tau_c)
    {
        require(tau_c > 0 && tau_u >= 0 && tau_u < tau_c, "Protocol 1 needs tau_u < tau_c");
        return 1.0 - static_cast<double>(tau_u) / tau_c;
    }

    double prelog_p2(int tau_u, int tau_d, int tau_c)
    {
        require(tau_c > 0 && tau_u >= 0 && tau_d >= 0 && tau_u + tau_d < tau_c, "Protocol 2 needs tau_u + tau_d < tau_c");
        return 1.0 - static_cast<double>(tau_u + tau_d) / tau_c;
    }

    double log2det_hpd(const CMatrix &x)
    {
        Eigen::LLT<CMatrix> llt(hermitian_part(x));
        if (llt.info() != Eigen::Success)
            throw NotPositiveDefinite("matrix is not Hermitian positive definite");
        double acc = 0.0;
        const CMatrix &f = llt.matrixLLT();
        for (Eigen::Index i = 0; i < f.rows(); ++i)
        {
            const double d = f(i, i).real();
            if (!(d > 0.0))
                throw NotPositiveDefinite("matrix is not Hermitian positive definite");
            acc += std::log2(d);
        }
        return 2.0 * acc;
    }

    double log_det_rate(const CMatrix &mean, const CMatrix &psi, double rho)
    {
        Eigen::LLT<CMatrix> llt(hermitian_part(psi));
        if (llt.info() != Eigen::Success)
            throw NotPositiveDefinite("noise covariance is not positive definite");
        const CMatrix x = llt.solve(mean);
        CMatrix q = rho * (mean.adjoint() * x);
        q.diagonal().array() += 1.0;
        return log2det_hpd(q);
    }

    double se_generic(const CMatrix &cond_mean, const CMatrix &cond_second_moment_sum, double prelog, double rho)
    {
        const auto n = cond_mean.rows();
        require(cond_mean.cols() == n && cond_second_moment_sum.rows() == n && cond_second_moment_sum.cols() == n,
                "se_generic expects square N x N inputs");
        CMatrix psi = rho * (cond_second_moment_sum - cond_mean * cond_mean.adjoint());
        psi.diagonal().array() += 1.0;
        psi = hermitian_part(psi);
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(psi, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < 1e-10)
            throw NotPositiveDefinite("Psi^a has an eigenvalue below 1e-10");
        return prelog * log_det_rate(cond_mean, psi, rho);
    }

    ClosedFormResult closed_form_p1(const RMatrix &beta, const channel::PilotBook &book,
                                    const estimation::UplinkStatistics &stats, const RMatrix &eta, int L,
                                    double prelog, double rho, const ClosedFormOptions &options)
    {
        const int M = stats.M, K = stats.K, N = stats.N;
        require(beta.rows() == M && beta.cols() == K && eta.rows() == M && eta.cols() == K,
                "beta and eta must be M x K");
        require(book.K == K && book.N == N, "pilot book does not match the statistics");
        require((eta.array() >= 0.0).all(), "eta must be non-negative");
        const double t = stats.tau_u * stats.rho_u;
        const double s = std::sqrt(t);
        const auto idx = [K](int m, int k) { return static_cast<std::size_t>(m * K + k); };

        std::vector<CMatrix> aa(static_cast<std::size_t>(M * K));
        std::vector<double> tr_aa(static_cast<std::size_t>(M * K));
        std::vector<double> contam(static_cast<std::size_t>(M * K * K)); // Tr(Phi_ik' AA_mk' Phi_ik'^H), index (m*K+k')*K+i
        std::vector<double> contam_sum(static_cast<std::size_t>(M * K)); // sum_i beta_mi * contam
        std::vector<bool> shares(static_cast<std::size_t>(K * K));      // Phi_kk' != 0
        for (int k = 0; k < K; ++k)
            for (int kp = 0; kp < K; ++kp)
                shares[static_cast<std::size_t>(k * K + kp)] = book.cross_of(k, kp).cwiseAbs().maxCoeff() > 0.0;
        for (int m = 0; m < M; ++m)
            for (int kp = 0; kp < K; ++kp)
            {
                const CMatrix &a = stats.a_of(m, kp);
                aa[idx(m, kp)] = a * a.adjoint();
                tr_aa[idx(m, kp)] = aa[idx(m, kp)].trace().real();
                double acc = 0.0;
                for (int i = 0; i < K; ++i)
                {
                    double v = 0.0;
                    if (shares[static_cast<std::size_t>(i * K + kp)])
                    {
                        const CMatrix phi = book.cross_of(i, kp);
                        v = (phi * aa[idx(m, kp)] * phi.adjoint()).trace().real();
                    }
                    contam[idx(m, kp) * K + i] = v;
                    acc += beta(m, i) * v;
                }
                contam_sum[idx(m, kp)] = acc;
            }

        ClosedFormResult res;
        ClosedFormPieces &p = res.pieces;
        p.d_bar.resize(K);
        p.psi_b.resize(K);
        p.t11.resize(K);
        p.t12.resize(K);
        p.t13.resize(K);
        p.t2.resize(K);
        if (options.keep_b_matrices)
        {
            p.b.resize(static_cast<std::size_t>(M * K * K));
            p.c_diag.resize(static_cast<std::size_t>(M * K * K));
        }
        res.report.prelog = prelog;
        res.report.protocol = Protocol::p1_closed_form;
        res.report.per_user_bits.resize(K);

        const CMatrix eye = CMatrix::Identity(N, N);
        for (int k = 0; k < K; ++k)
        {
            CMatrix d_bar = CMatrix::Zero(N, N);
            for (int m = 0; m < M; ++m)
                d_bar += std::sqrt(eta(m, k)) * beta(m, k) * stats.a_of(m, k);
            d_bar *= L * s;

            double noise_tr = 0.0;
            double contam_tr = 0.0;
            for (int m = 0; m < M; ++m)
                for (int kp = 0; kp < K; ++kp)
                {
                    const double w = eta(m, kp) * beta(m, k);
                    noise_tr += w * tr_aa[idx(m, kp)];
                    contam_tr += w * (contam_sum[idx(m, kp)] - beta(m, k) * contam[idx(m, kp) * K + k]);
                }
            CMatrix t13 = (rho * L * noise_tr) * eye;
            CMatrix t11 = (rho * t * L * contam_tr) * eye;

            CMatrix t12 = CMatrix::Zero(N, N);
            CMatrix t2 = CMatrix::Zero(N, N);
            for (int kp = 0; kp < K; ++kp)
            {
                const bool shared = shares[static_cast<std::size_t>(k * K + kp)];
                if (!shared && !options.keep_b_matrices)
                    continue;
                const CMatrix phi = book.cross_of(k, kp);
                CMatrix coherent = CMatrix::Zero(N, N);
                CMatrix self = CMatrix::Zero(N, N);
                for (int m = 0; m < M; ++m)
                {
                    const CMatrix b = phi * aa[idx(m, kp)] * phi.adjoint();
                    const double trb = b.trace().real();
                    if (options.keep_b_matrices)
                    {
                        CMatrix c = CMatrix::Zero(N, N);
                        for (int i = 0; i < N; ++i)
                            c(i, i) = trb + L * b(i, i).real();
                        p.b[idx(m, k) * K + kp] = b;
                        p.c_diag[idx(m, k) * K + kp] = std::move(c);
                    }
                    if (!shared)
                        continue;
                    const double w = eta(m, kp) * beta(m, k) * beta(m, k);
                    if (options.intra_ap == IntraApTerm::exact)
                    {
                        t12 += w * (static_cast<double>(L) * L * b + (L * trb) * eye);
                    }
                    else
                    {
                        CMatrix c = CMatrix::Zero(N, N);
                        for (int i = 0; i < N; ++i)
                            c(i, i) = trb + L * b(i, i).real();
                        t12 += (w * L) * c;
                    }
                    const CMatrix x = std::sqrt(eta(m, kp)) * beta(m, k) * stats.a_of(m, kp);
                    coherent += x;
                    self += x * x.adjoint();
                }
                if (shared)
                    t2 += phi * (coherent * coherent.adjoint() - self) * phi.adjoint();
            }
            t12 *= rho * t;
            t2 *= rho * t * L * L;

            CMatrix psi = t11 + t12 + t13 + t2 - rho * d_bar * d_bar.adjoint();
            psi.diagonal().array() += 1.0;
            psi = hermitian_part(psi);

            res.report.per_user_bits[k] = prelog * log_det_rate(d_bar, psi, rho);
            p.d_bar[k] = std::move(d_bar);
            p.psi_b[k] = std::move(psi);
            p.t11[k] = std::move(t11);
            p.t12[k] = std::move(t12);
            p.t13[k] = std::move(t13);
            p.t2[k] = std::move(t2);
        }
        return res;
    }

    std::vector<double> mmse_stream_sinr(const CMatrix &mean, const CMatrix &psi, double rho, MmseForm form)
    {
        const auto n = mean.cols();
        std::vector<double> out(static_cast<std::size_t>(n));
        if (form == MmseForm::standard)
        {
            for (Eigen::Index j = 0; j < n; ++j)
            {
                CMatrix q = psi;
                for (Eigen::Index o = 0; o < n; ++o)
                    if (o != j)
                        q += rho * mean.col(o) * mean.col(o).adjoint();
                Eigen::LLT<CMatrix> llt(hermitian_part(q));
                if (llt.info() != Eigen::Success)
                    throw NotPositiveDefinite("interference covariance is not positive definite");
                const CVector x = llt.solve(mean.col(j));
                out[static_cast<std::size_t>(j)] = rho * mean.col(j).dot(x).real();
            }
            return out;
        }
        Eigen::LLT<CMatrix> llt(hermitian_part(psi));
        if (llt.info() != Eigen::Success)
            throw NotPositiveDefinite("noise covariance is not positive definite");
        const CMatrix p = llt.solve(CMatrix::Identity(psi.rows(), psi.cols())) + mean * mean.adjoint();
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const CVector f = p * mean.col(j);
            const double num = std::norm(f.dot(mean.col(j)));
            const double den = f.dot(p * f).real() - num;
            out[static_cast<std::size_t>(j)] = num / den;
        }
        return out;
    }

    SEReport se_linear_mmse_p1(const ClosedFormPieces &pieces, double prelog, double rho, MmseForm form)
    {
        SEReport r;
        r.prelog = prelog;
        r.protocol = Protocol::p1_mmse;
        for (std::size_t k = 0; k < pieces.d_bar.size(); ++k)
        {
            double acc = 0.0;
            for (double z : mmse_stream_sinr(pieces.d_bar[k], pieces.psi_b[k], rho, form))
                acc += std::log2(1.0 + z);
            r.per_user_bits.push_back(prelog * acc);
        }
        return r;
    }

    RVector error_variance_rows(const RMatrix &err_var, int K, int N)
    {
        require(err_var.rows() == K * N && err_var.cols() == K * N, "error variance table has wrong shape");
        return err_var.rowwise().sum();
    }

    namespace
    {
        // I + rho sum_{k' != k} X_kk' X_kk'^H for the stacked row block of user k
        CMatrix interference_plus_noise(const CMatrix &d, int k, int K, int N, double rho)
        {
            CMatrix psi = CMatrix::Identity(N, N);
            for (int kp = 0; kp < K; ++kp)
            {
                if (kp == k)
                    continue;
                const auto blk = d.block(k * N, kp * N, N, N);
                psi.noalias() += rho * blk * blk.adjoint();
            }
            return psi;
        }
    }

    void se_p2_sic_into(const CMatrix &d_hat, const RVector &err_rows, int K, int N, double prelog, double rho,
                        std::vector<double> &out)
    {
        out.resize(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k)
        {
            CMatrix psi = interference_plus_noise(d_hat, k, K, N, rho);
            psi.diagonal() += rho * err_rows.segment(k * N, N).cast<cdouble>();
            out[static_cast<std::size_t>(k)] = prelog * log_det_rate(d_hat.block(k * N, k * N, N, N), psi, rho);
        }
    }

    std::vector<double> se_p2_sic(const estimation::EffectiveChannelEstimates &est, double prelog, double rho)
    {
        std::vector<double> out;
        se_p2_sic_into(est.d_hat, error_variance_rows(est.err_var, est.K, est.N), est.K, est.N, prelog, rho, out);
        return out;
    }

    void se_linear_mmse_p2_into(const CMatrix &d_hat, const RVector &err_rows, int K, int N, double prelog,
                                double rho, MmseForm form, std::vector<double> &out)
    {
        out.resize(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k)
        {
            CMatrix psi = interference_plus_noise(d_hat, k, K, N, rho);
            psi.diagonal() += rho * err_rows.segment(k * N, N).cast<cdouble>();
            double acc = 0.0;
            for (double z : mmse_stream_sinr(d_hat.block(k * N, k * N, N, N), psi, rho, form))
                acc += std::log2(1.0 + z);
            out[static_cast<std::size_t>(k)] = prelog * acc;
        }
    }

    std::vector<double> se_linear_mmse_p2(const estimation::EffectiveChannelEstimates &est, double prelog,
                                          double rho, MmseForm form)
    {
        std::vector<double> out;
        se_linear_mmse_p2_into(est.d_hat, error_variance_rows(est.err_var, est.K, est.N), est.K, est.N, prelog, rho,
                               form, out);
        return out;
    }

    void se_perfect_csi_into(const CMatrix &d, int K, int N, double prelog, double rho, std::vector<double> &out)
    {
        out.resize(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k)
        {
            const CMatrix psi = interference_plus_noise(d, k, K, N, rho);
            out[static_cast<std::size_t>(k)] = prelog * log_det_rate(d.block(k * N, k * N, N, N), psi, rho);
        }
    }

    std::vector<double> se_perfect_csi(const EffectiveChannels &eff, double prelog, double rho)
    {
        std::vector<double> out;
        se_perfect_csi_into(eff.d, eff.K, eff.N, prelog, rho, out);
        return out;
    }

    std::vector<double> se_up_approx(const RMatrix &beta, const RMatrix &gamma, const RMatrix &varsigma, double rho,
                                     double prelog, int L, int N)
    {
        require(L == 1 && N == 1, "the perfect CSI approximation is defined for L = N = 1 only");
        const auto M = beta.rows();
        const auto K = beta.cols();
        require(gamma.rows() == M && gamma.cols() == K && varsigma.rows() == M && varsigma.cols() == K,
                "beta, gamma and varsigma must share the M x K shape");
        // per-AP total sum_k' gamma_mk' varsigma_mk'^2
        const RVector ap_load = (gamma.array() * varsigma.array().square()).rowwise().sum();
        std::vector<double> out(static_cast<std::size_t>(K));
        for (Eigen::Index k = 0; k < K; ++k)
        {
            double coherent = 0.0, self = 0.0, interf = 0.0;
            for (Eigen::Index m = 0; m < M; ++m)
            {
                const double own = gamma(m, k) * varsigma(m, k) * varsigma(m, k);
                coherent += gamma(m, k) * varsigma(m, k);
                self += beta(m, k) * own;
                interf += beta(m, k) * (ap_load(m) - own);
            }
            out[static_cast<std::size_t>(k)] =
                prelog * std::log2(1.0 + (coherent * coherent + self) / (interf + 1.0 / rho));
        }
        return out;
    }

    StatisticalMoments::StatisticalMoments(int K, int N, int n_batches, int n_realizations)
        : K_(K), N_(N), n_batches_(n_batches)
    {
        require(n_batches >= 1 && n_realizations >= n_batches, "need at least one realization per batch");
        per_batch_ = (n_realizations + n_batches - 1) / n_batches;
        batches_.resize(static_cast<std::size_t>(n_batches));
        for (auto &b : batches_)
        {
            b.mean.assign(static_cast<std::size_t>(K), CMatrix::Zero(N, N));
            b.second.assign(static_cast<std::size_t>(K), CMatrix::Zero(N, N));
        }
    }

    void StatisticalMoments::add(const CMatrix &d)
    {
        const int b = std::min(count_ / per_batch_, n_batches_ - 1);
        Sums &s = batches_[static_cast<std::size_t>(b)];
        for (int k = 0; k < K_; ++k)
        {
            const auto row = d.middleRows(k * N_, N_);
            s.mean[static_cast<std::size_t>(k)] += d.block(k * N_, k * N_, N_, N_);
            s.second[static_cast<std::size_t>(k)].noalias() += row * row.adjoint();
        }
        ++s.n;
        ++count_;
    }

    StatisticalMoments::Sums StatisticalMoments::total() const
    {
        Sums t;
        t.mean.resize(static_cast<std::size_t>(K_));
        t.second.resize(static_cast<std::size_t>(K_));
        std::vector<CMatrix> parts(batches_.size());
        for (int k = 0; k < K_; ++k)
        {
            for (std::size_t b = 0; b < batches_.size(); ++b)
                parts[b] = batches_[b].mean[static_cast<std::size_t>(k)];
            t.mean[static_cast<std::size_t>(k)] = stats::pairwise_sum(parts);
            for (std::size_t b = 0; b < batches_.size(); ++b)
                parts[b] = batches_[b].second[static_cast<std::size_t>(k)];
            t.second[static_cast<std::size_t>(k)] = stats::pairwise_sum(parts);
        }
        t.n = count_;
        return t;
    }

    std::vector<double> StatisticalMoments::se_of(const Sums &s, double prelog, double rho) const
    {
        std::vector<double> out(static_cast<std::size_t>(K_));
        for (int k = 0; k < K_; ++k)
            out[static_cast<std::size_t>(k)] = se_generic(s.mean[static_cast<std::size_t>(k)] / s.n,
                                                          s.second[static_cast<std::size_t>(k)] / s.n, prelog, rho);
        return out;
    }

    std::vector<double> StatisticalMoments::se(double prelog, double rho) const
    {
        require(count_ > 0, "no realizations accumulated");
        return se_of(total(), prelog, rho);
    }

    std::vector<double> StatisticalMoments::standard_error(double prelog, double rho) const
    {
        const Sums all = total();
        std::vector<std::vector<double>> loo;
        for (const Sums &b : batches_)
        {
            if (b.n == 0)
                continue;
            Sums rest = all;
            for (int k = 0; k < K_; ++k)
            {
                rest.mean[static_cast<std::size_t>(k)] -= b.mean[static_cast<std::size_t>(k)];
                rest.second[static_cast<std::size_t>(k)] -= b.second[static_cast<std::size_t>(k)];
            }
            rest.n -= b.n;
            loo.push_back(se_of(rest, prelog, rho));
        }
        const double nb = static_cast<double>(loo.size());
        std::vector<double> out(static_cast<std::size_t>(K_), 0.0);
        for (int k = 0; k < K_; ++k)
        {
            double avg = 0.0;
            for (const auto &v : loo)
                avg += v[static_cast<std::size_t>(k)];
            avg /= nb;
            double ss = 0.0;
            for (const auto &v : loo)
                ss += (v[static_cast<std::size_t>(k)] - avg) * (v[static_cast<std::size_t>(k)] - avg);
            out[static_cast<std::size_t>(k)] = std::sqrt((nb - 1.0) / nb * ss);
        }
        return out;
    }

    Lemma3Params lemma3_params(const RMatrix &eta, const RMatrix &beta, const estimation::UplinkStatistics &stats,
                               int L)
    {
        const int M = stats.M, K = stats.K, N = stats.N;
        const estimation::EffectiveStats es = estimation::effective_channel_stats(eta, beta, stats, L);
        Lemma3Params p;
        p.K = K;
        p.N = N;
        p.mean = RMatrix::Zero(K * N, K * N);
        p.variance = RMatrix::Zero(K * N, K * N);
        for (int k = 0; k < K; ++k)
            for (int kp = 0; kp < K; ++kp)
                for (int i = 0; i < N; ++i)
                    for (int j = 0; j < N; ++j)
                    {
                        const int r = k * N + i, c = kp * N + j;
                        if (k == kp && i == j)
                        {
                            double v = 0.0;
                            for (int m = 0; m < M; ++m)
                                v += eta(m, k) * stats.gamma_of(m, k, i) * stats.gamma_of(m, k, i);
                            p.mean(r, c) = es.kappa(k, i);
                            p.variance(r, c) = L * v;
                        }
                        else
                        {
                            p.variance(r, c) = es.xi_of(k, kp, j);
                        }
                    }
        return p;
    }

    CMatrix lemma4_oracle(const CMatrix &c, const std::vector<CMatrix> &column_covariances)
    {
        const auto n = static_cast<Eigen::Index>(column_covariances.size());
        CMatrix out = CMatrix::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k)
        {
            const CMatrix &cov = column_covariances[static_cast<std::size_t>(k)];
            require(cov.rows() == c.rows() && cov.cols() == c.cols(), "column covariance shape mismatch");
            out(k, k) = (c * cov).trace();
        }
        return out;
    }

    std::vector<CMatrix> lemma4_column_covariances(int M, int N)
    {
        return std::vector<CMatrix>(static_cast<std::size_t>(N), static_cast<double>(M) * CMatrix::Identity(N, N));
    }
}
