#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>

namespace multirank::detail {

// Two-sided 95% Student-t quantiles (0.975 upper quantile) for df = 1..200,
// precomputed by inverting the regularized-incomplete-beta CDF to ~1e-12.
// Above df = 200 the normal limit 1.95996 is accurate to < 2e-4 relative.
inline constexpr std::array<double, 200> kStudentT975{
    12.7062047362,     4.30265272975,     3.18244630528,     2.7764451052,
    2.57058183564,     2.44691185114,     2.36462425159,     2.3060041352,
    2.2621571628,      2.22813885199,     2.20098516009,     2.17881282967,
    2.16036865646,     2.14478668792,     2.13144954556,     2.11990529922,
    2.10981557783,     2.10092204024,     2.09302405441,     2.08596344727,
    2.07961384473,     2.0738730679,      2.06865761042,     2.06389856163,
    2.05953855275,     2.05552943864,     2.05183051648,     2.0484071418,
    2.04522964213,     2.0422724563,      2.0395134464,      2.03693334346,
    2.03451529745,     2.03224450932,     2.03010792825,     2.02809400098,
    2.02619246303,     2.02439416391,     2.02269092004,     2.02107539031,
    2.01954097044,     2.01808170282,     2.01669219923,     2.01536757444,
    2.01410338888,     2.01289559892,     2.01174051373,     2.01063475762,
    2.00957523713,     2.0085591121,      2.00758377032,     2.00664680506,
    2.00574599532,     2.00487928819,     2.00404478329,     2.00324071885,
    2.00246545929,     2.00171748415,     2.00099537809,     2.00029782201,
    1.99962358499,     1.99897151703,     1.99834054252,     1.99772965432,
    1.99713790839,     1.99656441895,     1.99600835403,     1.99546893143,
    1.99494541511,     1.99443711177,     1.99394336785,     1.99346356666,
    1.99299712589,     1.99254349518,     1.992102154,       1.99167260964,
    1.99125439539,     1.99084706881,     1.99045021023,     1.99006342125,
    1.98968632346,     1.98931855714,     1.98895978018,     1.98860966698,
    1.98826790748,     1.98793420624,     1.98760828159,     1.98728986483,
    1.98697869951,     1.9866745407,      1.98637715442,     1.98608631695,
    1.98580181435,     1.98552344187,     1.98525100351,     1.98498431152,
    1.98472318601,     1.98446745451,     1.98421695159,     1.98397151852,
    1.98373100296,     1.98349525856,     1.98326414477,     1.98303752648,
    1.9828152738,      1.98259726177,     1.98238337018,     1.98217348331,
    1.98196748974,     1.98176528213,     1.98156675707,     1.98137181488,
    1.98118035941,     1.98099229798,     1.9808075411,      1.98062600246,
    1.98044759868,     1.98027224927,     1.98009987646,     1.97993040508,
    1.97976376251,     1.97959987849,     1.97943868509,     1.9792801166,
    1.97912410942,     1.97897060199,     1.9788195347,      1.97867084984,
    1.97852449148,     1.97838040545,     1.97823853923,     1.97809884192,
    1.97796126417,     1.97782575809,     1.97769227724,     1.97756077656,
    1.97743121231,     1.97730354203,     1.97717772449,     1.97705371966,
    1.97693148863,     1.97681099363,     1.97669219793,     1.97657506583,
    1.97645956263,     1.97634565459,     1.9762333089,      1.97612249361,
    1.97601317769,     1.9759053309,      1.97579892382,     1.97569392782,
    1.97559031501,     1.97548805823,     1.97538713106,     1.9752875077,
    1.97518916308,     1.97509207271,     1.97499621277,     1.97490156,
    1.97480809175,     1.97471578592,     1.97462462097,     1.97453457586,
    1.97444563009,     1.97435776366,     1.97427095703,     1.97418519114,
    1.9741004474,      1.97401670763,     1.9739339541,      1.97385216949,
    1.97377133689,     1.97369143976,     1.97361246195,     1.97353438771,
    1.97345720159,     1.97338088855,     1.97330543384,     1.97323082307,
    1.97315704216,     1.97308407734,     1.97301191514,     1.97294054239,
    1.97286994621,     1.972800114,       1.97273103341,     1.97266269238,
    1.9725950791,      1.972528182,       1.97246198977,     1.97239649132,
    1.9723316758,      1.97226753258,     1.97220405127,     1.97214122166,
    1.97207903378,     1.97201747784,     1.97195654425,     1.97189622363,
};

inline constexpr double kNormal975 = 1.9599636593;

inline double student_t_975(std::size_t df) {
    if (df < 1) throw std::invalid_argument("student_t_975: df must be >= 1");
    if (df <= kStudentT975.size()) return kStudentT975[df - 1];
    return kNormal975;
}

}  // namespace multirank::detail
