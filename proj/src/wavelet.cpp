#include "wrmsm/wavelet.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "wrmsm/errors.hpp"

namespace wrmsm {

namespace {

// Extremal-phase Daubechies scaling filters, unit l2 norm, sum sqrt(2).
// Obtained by spectral factorization of the Daubechies polynomial in 60-digit
// arithmetic, zeros inside the unit circle.
const std::array<std::vector<double>, 10> kDaubechies = {{
    {0.70710678118654752440, 0.70710678118654752440},
    {0.48296291314453414337, 0.83651630373780790558, 0.22414386804201338103,
     -0.12940952255126038117},
    {0.33267055295008261600, 0.80689150931109257649, 0.45987750211849157010,
     -0.13501102001025458870, -0.085441273882026661693, 0.035226291885709536603},
    {0.23037781330889650086, 0.71484657055291564709, 0.63088076792985890788,
     -0.027983769416859854211, -0.18703481171909308408, 0.030841381835560763627,
     0.032883011666885199735, -0.010597401785069032105},
    {0.16010239797419291448, 0.60382926979718967054, 0.72430852843777292773,
     0.13842814590132073151, -0.24229488706638203186, -0.032244869584638374648,
     0.077571493840045713523, -0.0062414902127982742742, -0.012580751999081999469,
     0.0033357252854737712780},
    {0.11154074335010946362, 0.49462389039845308568, 0.75113390802109535068,
     0.31525035170919762909, -0.22626469396543982008, -0.12976686756726193556,
     0.097501605587323049102, 0.027522865530305728626, -0.031582039317486029565,
     0.00055384220116149613925, 0.0047772575109455106396, -0.0010773010853084795649},
    {0.077852054085009179020, 0.39653931948191730654, 0.72913209084623511992,
     0.46978228740519312247, -0.14390600392856497541, -0.22403618499387498264,
     0.071309219266830264751, 0.080612609151083071913, -0.038029936935014413580,
     -0.016574541630666880654, 0.012550998556099840613, 0.00042957797292136652113,
     -0.0018016407040474909153, 0.00035371379997452024845},
    {0.054415842243104009955, 0.31287159091429997066, 0.67563073629728980681,
     0.58535468365420671277, -0.015829105256349305667, -0.28401554296154692652,
     0.00047248457391328277036, 0.12874742662047845886, -0.017369301001807546170,
     -0.044088253930794751507, 0.013981027917398281649, 0.0087460940474057767164,
     -0.0048703529934515743104, -0.00039174037337694704630, 0.00067544940645056936637,
     -0.00011747678412476953373},
    {0.038077947363878346589, 0.24383467461259035373, 0.60482312369011111190,
     0.65728807805130053808, 0.13319738582500757619, -0.29327378327917490881,
     -0.096840783222976460514, 0.14854074933810638014, 0.030725681479333379212,
     -0.067632829061329973676, 0.00025094711483145195759, 0.022361662123679097205,
     -0.0047232047577513972779, -0.0042815036824634298345, 0.0018476468830562264766,
     0.00023038576352319596721, -0.00025196318894271013697, 0.000039347320316271599481},
    {0.026670057900555553587, 0.18817680007769148902, 0.52720118893172558648,
     0.68845903945360356574, 0.28117234366057746075, -0.24984642432731537942,
     -0.19594627437737704350, 0.12736934033579326008, 0.093057364603572351160,
     -0.071394147166397087145, -0.029457536821875812858, 0.033212674059341001740,
     0.0036065535669561696554, -0.010733175483330575044, 0.0013953517470529011658,
     0.0019924052951850561172, -0.00068585669495971162656, -0.00011646685512928545095,
     0.000093588670320069591334, -0.000013264202894521244812},
}};

long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

}  // namespace

double FilterBank::highpass_moment(int m) const {
    double s = 0.0;
    for (std::size_t k = 0; k < highpass.size(); ++k) s += std::pow(double(k), m) * highpass[k];
    return s;
}

FilterBank daubechies(int n_vanishing) {
    if (n_vanishing < 1 || n_vanishing > 10) {
        std::ostringstream os;
        os << "unsupported Daubechies order " << n_vanishing << " (supported: 1..10)";
        throw ConfigError(os.str());
    }
    FilterBank bank;
    bank.n_vanishing = n_vanishing;
    bank.lowpass = kDaubechies[static_cast<std::size_t>(n_vanishing - 1)];
    bank.support_length = static_cast<int>(bank.lowpass.size());
    const int t = bank.support_length;
    bank.highpass.resize(bank.lowpass.size());
    for (int k = 0; k < t; ++k)
        bank.highpass[static_cast<std::size_t>(k)] =
            ((k % 2 == 0) ? 1.0 : -1.0) * bank.lowpass[static_cast<std::size_t>(t - 1 - k)];
    return bank;
}

const Eigen::MatrixXd& WaveletDecomposition::at(int j) const {
    auto it = details.find(j);
    if (it == details.end()) {
        std::ostringstream os;
        os << "octave " << j << " not present in decomposition (available " << j_min << ".." << j_max
           << ")";
        throw DomainError(os.str());
    }
    return it->second;
}

Eigen::Index border_free_count(Eigen::Index n, int support_length, int octave) {
    const long long scale = 1LL << octave;
    const long long lo = ceil_div(support_length, scale);
    const long long hi = floor_div(static_cast<long long>(n) + 1 - scale * support_length, scale);
    return static_cast<Eigen::Index>(std::max(0LL, hi - lo + 1));
}

WaveletDecomposition decompose(const Panel& panel, const FilterBank& bank, int j_max) {
    validate_panel(panel);
    if (j_max < 1) throw ConfigError("j_max must be at least 1");
    if (j_max > 40) throw ConfigError("j_max too large");
    const long long n = panel.n();
    const int t = bank.support_length;
    for (int j = 1; j <= j_max; ++j) {
        if ((1LL << j) * (t + 1) > n || border_free_count(n, t, j) < 1) {
            std::ostringstream os;
            os << "series length " << n << " too short for octave " << j << " with a " << t
               << "-tap filter (needs 2^" << j << " * " << (t + 1) << " samples)";
            throw ConfigError(os.str());
        }
    }

    WaveletDecomposition out;
    out.j_min = 1;
    out.j_max = j_max;
    out.source_n = panel.n();

    // approx holds A(2^j, k) for k in [lo, hi]; indices follow the series (1-based).
    Eigen::MatrixXd approx = panel.data;
    long long lo = 1, hi = n;
    for (int j = 1; j <= j_max; ++j) {
        const long long next_lo = ceil_div(lo, 2);
        const long long next_hi = floor_div(hi - t + 1, 2);
        const Eigen::Index len = static_cast<Eigen::Index>(next_hi - next_lo + 1);
        Eigen::MatrixXd next(panel.p(), len);
        Eigen::MatrixXd detail(panel.p(), len);
        next.setZero();
        detail.setZero();
        for (Eigen::Index c = 0; c < len; ++c) {
            const long long k = next_lo + c;
            for (int m = 0; m < t; ++m) {
                const Eigen::Index src = static_cast<Eigen::Index>(2 * k + m - lo);
                next.col(c) += bank.lowpass[static_cast<std::size_t>(m)] * approx.col(src);
                detail.col(c) += bank.highpass[static_cast<std::size_t>(m)] * approx.col(src);
            }
        }

        const long long scale = 1LL << j;
        const long long keep_lo = std::max(next_lo, ceil_div(t, scale));
        const long long keep_hi = std::min(next_hi, floor_div(n + 1 - scale * t, scale));
        const Eigen::Index count = static_cast<Eigen::Index>(keep_hi - keep_lo + 1);
        out.details[j] = detail.middleCols(static_cast<Eigen::Index>(keep_lo - next_lo), count);
        out.counts[j] = count;
        out.first_index[j] = keep_lo;

        approx = std::move(next);
        lo = next_lo;
        hi = next_hi;
    }
    return out;
}

}  // namespace wrmsm
