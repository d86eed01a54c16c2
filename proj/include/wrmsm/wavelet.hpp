#pragma once

// Daubechies filter banks and Mallat's pyramid, keeping only detail
// coefficients that do not touch the series borders.

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "wrmsm/synth.hpp"

namespace wrmsm {

struct FilterBank {
    int n_vanishing = 0;          // N_psi
    std::vector<double> lowpass;  // u_k, k = 0..T-1
    std::vector<double> highpass; // v_k = (-1)^k u_{T-1-k}
    int support_length = 0;       // T, number of taps

    /// sum_k k^m v_k for m = 0, 1, ...
    double highpass_moment(int m) const;
};

/// Extremal-phase Daubechies bank with N_psi vanishing moments, N_psi in 1..10.
/// N_psi = 1 is the Haar bank.
FilterBank daubechies(int n_vanishing);

struct WaveletDecomposition {
    /// octave j -> p x n_j matrix; column c holds D(2^j, first_index[j] + c).
    std::map<int, Eigen::MatrixXd> details;
    std::map<int, Eigen::Index> counts;
    std::map<int, long long> first_index;
    int j_min = 1;
    int j_max = 0;
    Eigen::Index source_n = 0;

    bool has_octave(int j) const { return details.count(j) != 0; }
    const Eigen::MatrixXd& at(int j) const;
};

/// Number of border-free coefficients at octave j for a series of length n
/// and a T-tap filter: shifts k with T/2^j <= k <= (n+1)/2^j - T.
Eigen::Index border_free_count(Eigen::Index n, int support_length, int octave);

/// Mallat recursion A(2^{j+1},k) = sum_m u_m A(2^j, 2k+m), D likewise with v,
/// started at A(2^0,k) = Y(k). Octaves 1..j_max are kept, border-trimmed.
WaveletDecomposition decompose(const Panel& panel, const FilterBank& bank, int j_max);

}  // namespace wrmsm
