#include "finsler/ode.hpp"

#include "finsler/errors.hpp"
#include "finsler/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace finsler {

namespace {

// Dormand-Prince 8(5,3) tableau, error weights and dense-output coefficients
// (Hairer, Norsett & Wanner).
constexpr double c2 = 0.526001519587677318785587544488e-01;
constexpr double c3 = 0.789002279381515978178381316732e-01;
constexpr double c4 = 0.118350341907227396726757197510e+00;
constexpr double c5 = 0.281649658092772603273242802490e+00;
constexpr double c6 = 0.333333333333333333333333333333e+00;
constexpr double c7 = 0.25e+00;
constexpr double c8 = 0.307692307692307692307692307692e+00;
constexpr double c9 = 0.651282051282051282051282051282e+00;
constexpr double c10 = 0.6e+00;
constexpr double c11 = 0.857142857142857142857142857142e+00;
constexpr double c14 = 0.1e+00;
constexpr double c15 = 0.2e+00;
constexpr double c16 = 0.777777777777777777777777777778e+00;
constexpr double a21 = 5.26001519587677318785587544488e-2;
constexpr double a31 = 1.97250569845378994544595329183e-2;
constexpr double a32 = 5.91751709536136983633785987549e-2;
constexpr double a41 = 2.95875854768068491816892993775e-2;
constexpr double a43 = 8.87627564304205475450678981324e-2;
constexpr double a51 = 2.41365134159266685502369798665e-1;
constexpr double a53 = -8.84549479328286085344864962717e-1;
constexpr double a54 = 9.24834003261792003115737966543e-1;
constexpr double a61 = 3.7037037037037037037037037037e-2;
constexpr double a64 = 1.70828608729473871279604482173e-1;
constexpr double a65 = 1.25467687566822425016691814123e-1;
constexpr double a71 = 3.7109375e-2;
constexpr double a74 = 1.70252211019544039314978060272e-1;
constexpr double a75 = 6.02165389804559606850219397283e-2;
constexpr double a76 = -1.7578125e-2;
constexpr double a81 = 3.70920001185047927108779319836e-2;
constexpr double a84 = 1.70383925712239993810214054705e-1;
constexpr double a85 = 1.07262030446373284651809199168e-1;
constexpr double a86 = -1.53194377486244017527936158236e-2;
constexpr double a87 = 8.27378916381402288758473766002e-3;
constexpr double a91 = 6.24110958716075717114429577812e-1;
constexpr double a94 = -3.36089262944694129406857109825e0;
constexpr double a95 = -8.68219346841726006818189891453e-1;
constexpr double a96 = 2.75920996994467083049415600797e1;
constexpr double a97 = 2.01540675504778934086186788979e1;
constexpr double a98 = -4.34898841810699588477366255144e1;
constexpr double a101 = 4.77662536438264365890433908527e-1;
constexpr double a104 = -2.48811461997166764192642586468e0;
constexpr double a105 = -5.90290826836842996371446475743e-1;
constexpr double a106 = 2.12300514481811942347288949897e1;
constexpr double a107 = 1.52792336328824235832596922938e1;
constexpr double a108 = -3.32882109689848629194453265587e1;
constexpr double a109 = -2.03312017085086261358222928593e-2;
constexpr double a111 = -9.3714243008598732571704021658e-1;
constexpr double a114 = 5.18637242884406370830023853209e0;
constexpr double a115 = 1.09143734899672957818500254654e0;
constexpr double a116 = -8.14978701074692612513997267357e0;
constexpr double a117 = -1.85200656599969598641566180701e1;
constexpr double a118 = 2.27394870993505042818970056734e1;
constexpr double a119 = 2.49360555267965238987089396762e0;
constexpr double a1110 = -3.0467644718982195003823669022e0;
constexpr double a121 = 2.27331014751653820792359768449e0;
constexpr double a124 = -1.05344954667372501984066689879e1;
constexpr double a125 = -2.00087205822486249909675718444e0;
constexpr double a126 = -1.79589318631187989172765950534e1;
constexpr double a127 = 2.79488845294199600508499808837e1;
constexpr double a128 = -2.85899827713502369474065508674e0;
constexpr double a129 = -8.87285693353062954433549289258e0;
constexpr double a1210 = 1.23605671757943030647266201528e1;
constexpr double a1211 = 6.43392746015763530355970484046e-1;
constexpr double a141 = 5.61675022830479523392909219681e-2;
constexpr double a147 = 2.53500210216624811088794765333e-1;
constexpr double a148 = -2.46239037470802489917441475441e-1;
constexpr double a149 = -1.24191423263816360469010140626e-1;
constexpr double a1410 = 1.5329179827876569731206322685e-1;
constexpr double a1411 = 8.20105229563468988491666602057e-3;
constexpr double a1412 = 7.56789766054569976138603589584e-3;
constexpr double a1413 = -8.298e-3;
constexpr double a151 = 3.18346481635021405060768473261e-2;
constexpr double a156 = 2.83009096723667755288322961402e-2;
constexpr double a157 = 5.35419883074385676223797384372e-2;
constexpr double a158 = -5.49237485713909884646569340306e-2;
constexpr double a1511 = -1.08347328697249322858509316994e-4;
constexpr double a1512 = 3.82571090835658412954920192323e-4;
constexpr double a1513 = -3.40465008687404560802977114492e-4;
constexpr double a1514 = 1.41312443674632500278074618366e-1;
constexpr double a161 = -4.28896301583791923408573538692e-1;
constexpr double a166 = -4.69762141536116384314449447206e0;
constexpr double a167 = 7.68342119606259904184240953878e0;
constexpr double a168 = 4.06898981839711007970213554331e0;
constexpr double a169 = 3.56727187455281109270669543021e-1;
constexpr double a1613 = -1.39902416515901462129418009734e-3;
constexpr double a1614 = 2.9475147891527723389556272149e0;
constexpr double a1615 = -9.15095847217987001081870187138e0;
constexpr double b1 = 5.42937341165687622380535766363e-2;
constexpr double b6 = 4.45031289275240888144113950566e0;
constexpr double b7 = 1.89151789931450038304281599044e0;
constexpr double b8 = -5.8012039600105847814672114227e0;
constexpr double b9 = 3.1116436695781989440891606237e-1;
constexpr double b10 = -1.52160949662516078556178806805e-1;
constexpr double b11 = 2.01365400804030348374776537501e-1;
constexpr double b12 = 4.47106157277725905176885569043e-2;
constexpr double e31 = 0.244094488188976377952755905512e+00;
constexpr double e32 = 0.733846688281611857341361741547e+00;
constexpr double e33 = 0.220588235294117647058823529412e-01;
constexpr double e51 = 0.1312004499419488073250102996e-01;
constexpr double e56 = -0.1225156446376204440720569753e+01;
constexpr double e57 = -0.4957589496572501915214079952e+00;
constexpr double e58 = 0.1664377182454986536961530415e+01;
constexpr double e59 = -0.3503288487499736816886487290e+00;
constexpr double e510 = 0.3341791187130174790297318841e+00;
constexpr double e511 = 0.8192320648511571246570742613e-01;
constexpr double e512 = -0.2235530786388629525884427845e-01;
constexpr double d41 = -0.84289382761090128651353491142e+01;
constexpr double d46 = 0.56671495351937776962531783590e+00;
constexpr double d47 = -0.30689499459498916912797304727e+01;
constexpr double d48 = 0.23846676565120698287728149680e+01;
constexpr double d49 = 0.21170345824450282767155149946e+01;
constexpr double d410 = -0.87139158377797299206789907490e+00;
constexpr double d411 = 0.22404374302607882758541771650e+01;
constexpr double d412 = 0.63157877876946881815570249290e+00;
constexpr double d413 = -0.88990336451333310820698117400e-01;
constexpr double d414 = 0.18148505520854727256656404962e+02;
constexpr double d415 = -0.91946323924783554000451984436e+01;
constexpr double d416 = -0.44360363875948939664310572000e+01;
constexpr double d51 = 0.10427508642579134603413151009e+02;
constexpr double d56 = 0.24228349177525818288430175319e+03;
constexpr double d57 = 0.16520045171727028198505394887e+03;
constexpr double d58 = -0.37454675472269020279518312152e+03;
constexpr double d59 = -0.22113666853125306036270938578e+02;
constexpr double d510 = 0.77334326684722638389603898808e+01;
constexpr double d511 = -0.30674084731089398182061213626e+02;
constexpr double d512 = -0.93321305264302278729567221706e+01;
constexpr double d513 = 0.15697238121770843886131091075e+02;
constexpr double d514 = -0.31139403219565177677282850411e+02;
constexpr double d515 = -0.93529243588444783865713862664e+01;
constexpr double d516 = 0.35816841486394083752465898540e+02;
constexpr double d61 = 0.19985053242002433820987653617e+02;
constexpr double d66 = -0.38703730874935176555105901742e+03;
constexpr double d67 = -0.18917813819516756882830838328e+03;
constexpr double d68 = 0.52780815920542364900561016686e+03;
constexpr double d69 = -0.11573902539959630126141871134e+02;
constexpr double d610 = 0.68812326946963000169666922661e+01;
constexpr double d611 = -0.10006050966910838403183860980e+01;
constexpr double d612 = 0.77771377980534432092869265740e+00;
constexpr double d613 = -0.27782057523535084065932004339e+01;
constexpr double d614 = -0.60196695231264120758267380846e+02;
constexpr double d615 = 0.84320405506677161018159903784e+02;
constexpr double d616 = 0.11992291136182789328035130030e+02;
constexpr double d71 = -0.25693933462703749003312586129e+02;
constexpr double d76 = -0.15418974869023643374053993627e+03;
constexpr double d77 = -0.23152937917604549567536039109e+03;
constexpr double d78 = 0.35763911791061412378285349910e+03;
constexpr double d79 = 0.93405324183624310003907691704e+02;
constexpr double d710 = -0.37458323136451633156875139351e+02;
constexpr double d711 = 0.10409964950896230045147246184e+03;
constexpr double d712 = 0.29840293426660503123344363579e+02;
constexpr double d713 = -0.43533456590011143754432175058e+02;
constexpr double d714 = 0.96324553959188282948394950600e+02;
constexpr double d715 = -0.39177261675615439165231486172e+02;
constexpr double d716 = -0.14972683625798562581422125276e+03;
constexpr double kSafety = 0.9;
constexpr double kMinScale = 0.333;
constexpr double kMaxScale = 6.0;

struct Stepper {
  const OdeRhs& f;
  int evaluations = 0;

  Vector eval(double t, const Vector& y) {
    Vector out(y.size());
    f(t, y, out);
    ++evaluations;
    if (!out.allFinite())
      throw DomainError("ode: non-finite derivative at t = " + format_number(t));
    return out;
  }
};

struct Trial {
  Vector y_new;
  Vector k[17];  // k[1..16]
  double err = 0.0;
};

void attempt(Stepper& s, double t, const Vector& y, const Vector& k1, double h,
             const OdeOptions& o, Trial& out) {
  Vector* k = out.k;
  k[1] = k1;
  k[2] = s.eval(t + c2 * h, y + h * (a21 * k[1]));
  k[3] = s.eval(t + c3 * h, y + h * (a31 * k[1] + a32 * k[2]));
  k[4] = s.eval(t + c4 * h, y + h * (a41 * k[1] + a43 * k[3]));
  k[5] = s.eval(t + c5 * h, y + h * (a51 * k[1] + a53 * k[3] + a54 * k[4]));
  k[6] = s.eval(t + c6 * h, y + h * (a61 * k[1] + a64 * k[4] + a65 * k[5]));
  k[7] = s.eval(t + c7 * h, y + h * (a71 * k[1] + a74 * k[4] + a75 * k[5] + a76 * k[6]));
  k[8] = s.eval(t + c8 * h,
                y + h * (a81 * k[1] + a84 * k[4] + a85 * k[5] + a86 * k[6] + a87 * k[7]));
  k[9] = s.eval(t + c9 * h, y + h * (a91 * k[1] + a94 * k[4] + a95 * k[5] + a96 * k[6] +
                                     a97 * k[7] + a98 * k[8]));
  k[10] = s.eval(t + c10 * h, y + h * (a101 * k[1] + a104 * k[4] + a105 * k[5] + a106 * k[6] +
                                       a107 * k[7] + a108 * k[8] + a109 * k[9]));
  k[11] = s.eval(t + c11 * h, y + h * (a111 * k[1] + a114 * k[4] + a115 * k[5] + a116 * k[6] +
                                       a117 * k[7] + a118 * k[8] + a119 * k[9] + a1110 * k[10]));
  k[12] = s.eval(t + h, y + h * (a121 * k[1] + a124 * k[4] + a125 * k[5] + a126 * k[6] +
                                 a127 * k[7] + a128 * k[8] + a129 * k[9] + a1210 * k[10] +
                                 a1211 * k[11]));
  const Vector incr = b1 * k[1] + b6 * k[6] + b7 * k[7] + b8 * k[8] + b9 * k[9] + b10 * k[10] +
                      b11 * k[11] + b12 * k[12];
  out.y_new = y + h * incr;
  const Vector e3 = incr - e31 * k[1] - e32 * k[9] - e33 * k[12];
  const Vector e5 = e51 * k[1] + e56 * k[6] + e57 * k[7] + e58 * k[8] + e59 * k[9] +
                    e510 * k[10] + e511 * k[11] + e512 * k[12];
  const Vector sk = (o.atol + o.rtol * y.cwiseAbs().cwiseMax(out.y_new.cwiseAbs()).array()).matrix();
  const double err5 = (e5.array() / sk.array()).square().sum();
  const double err3 = (e3.array() / sk.array()).square().sum();
  double deno = err5 + 0.01 * err3;
  if (deno <= 0.0) deno = 1.0;
  out.err = std::abs(h) * err5 * std::sqrt(1.0 / (static_cast<double>(y.size()) * deno));
}

DenseStep make_dense(Stepper& s, double t, const Vector& y, double h, Trial& tr) {
  Vector* k = tr.k;
  k[13] = s.eval(t + h, tr.y_new);
  k[14] = s.eval(t + c14 * h, y + h * (a141 * k[1] + a147 * k[7] + a148 * k[8] + a149 * k[9] +
                                       a1410 * k[10] + a1411 * k[11] + a1412 * k[12] +
                                       a1413 * k[13]));
  k[15] = s.eval(t + c15 * h, y + h * (a151 * k[1] + a156 * k[6] + a157 * k[7] + a158 * k[8] +
                                       a1511 * k[11] + a1512 * k[12] + a1513 * k[13] +
                                       a1514 * k[14]));
  k[16] = s.eval(t + c16 * h, y + h * (a161 * k[1] + a166 * k[6] + a167 * k[7] + a168 * k[8] +
                                       a169 * k[9] + a1613 * k[13] + a1614 * k[14] +
                                       a1615 * k[15]));
  DenseStep d;
  d.t0 = t;
  d.h = h;
  d.coefficients.resize(8, y.size());
  const Vector r2 = tr.y_new - y;
  const Vector r3 = h * k[1] - r2;
  d.coefficients.row(0) = y.transpose();
  d.coefficients.row(1) = r2.transpose();
  d.coefficients.row(2) = r3.transpose();
  d.coefficients.row(3) = (r2 - h * k[13] - r3).transpose();
  d.coefficients.row(4) =
      (h * (d41 * k[1] + d46 * k[6] + d47 * k[7] + d48 * k[8] + d49 * k[9] + d410 * k[10] +
            d411 * k[11] + d412 * k[12] + d413 * k[13] + d414 * k[14] + d415 * k[15] +
            d416 * k[16]))
          .transpose();
  d.coefficients.row(5) =
      (h * (d51 * k[1] + d56 * k[6] + d57 * k[7] + d58 * k[8] + d59 * k[9] + d510 * k[10] +
            d511 * k[11] + d512 * k[12] + d513 * k[13] + d514 * k[14] + d515 * k[15] +
            d516 * k[16]))
          .transpose();
  d.coefficients.row(6) =
      (h * (d61 * k[1] + d66 * k[6] + d67 * k[7] + d68 * k[8] + d69 * k[9] + d610 * k[10] +
            d611 * k[11] + d612 * k[12] + d613 * k[13] + d614 * k[14] + d615 * k[15] +
            d616 * k[16]))
          .transpose();
  d.coefficients.row(7) =
      (h * (d71 * k[1] + d76 * k[6] + d77 * k[7] + d78 * k[8] + d79 * k[9] + d710 * k[10] +
            d711 * k[11] + d712 * k[12] + d713 * k[13] + d714 * k[14] + d715 * k[15] +
            d716 * k[16]))
          .transpose();
  return d;
}

double initial_step(Stepper& s, double t0, const Vector& y0, const Vector& f0, double direction,
                    double h_max, const OdeOptions& o) {
  const Vector sk = (o.atol + o.rtol * y0.cwiseAbs().array()).matrix();
  const double dnf = (f0.array() / sk.array()).square().sum();
  const double dny = (y0.array() / sk.array()).square().sum();
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
  h = std::min(h, h_max);
  double h1;
  try {
    const Vector f1 = s.eval(t0 + direction * h, y0 + direction * h * f0);
    const double der2 = std::sqrt(((f1 - f0).array() / sk.array()).square().sum()) / h;
    const double der12 = std::max(der2, std::sqrt(dnf));
    h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
  } catch (const DomainError&) {
    h1 = 0.1 * h;
  }
  return std::min({100.0 * h, h1, h_max});
}

}  // namespace

Vector DenseStep::state(double t) const {
  const double s = (t - t0) / h;
  const double s1 = 1.0 - s;
  const auto r = [&](int i) { return coefficients.row(i).transpose(); };
  const Vector a6 = r(6) + s * r(7);
  const Vector a5 = r(5) + s1 * a6;
  const Vector a4 = r(4) + s * a5;
  const Vector a3 = r(3) + s1 * a4;
  const Vector a2 = r(2) + s * a3;
  const Vector a1 = r(1) + s1 * a2;
  return r(0) + s * a1;
}

Vector DenseStep::rate(double t) const {
  const double s = (t - t0) / h;
  const double s1 = 1.0 - s;
  const auto r = [&](int i) { return coefficients.row(i).transpose(); };
  // Nested evaluation carrying d/ds alongside each partial sum.
  Vector a = r(6) + s * r(7);
  Vector da = r(7);
  const double weights[] = {s1, s, s1, s, s1};  // for rows 5, 4, 3, 2, 1
  for (int row = 5, w = 0; row >= 1; --row, ++w) {
    const double c = weights[w];
    const double dc = (w % 2 == 0) ? -1.0 : 1.0;
    Vector next = r(row) + c * a;
    da = dc * a + c * da;
    a = std::move(next);
  }
  return (a + s * da) / h;
}

DenseSolution::DenseSolution(std::vector<DenseStep> steps, double t_begin, double t_end)
    : steps_(std::move(steps)), t_begin_(t_begin), t_end_(t_end) {}

const DenseStep& DenseSolution::locate(double t) const {
  if (steps_.empty()) throw std::logic_error("dense solution is empty");
  const double lo = std::min(t_begin_, t_end_);
  const double hi = std::max(t_begin_, t_end_);
  const double slack = 1e-12 * std::max(1.0, std::abs(hi - lo));
  if (t < lo - slack || t > hi + slack)
    throw DomainError("dense output requested at t = " + format_number(t) + " outside [" +
                      format_number(lo) + ", " + format_number(hi) + "]");
  const bool forward = t_end_ >= t_begin_;
  // Steps are stored in integration order; offsets from t_begin increase.
  const double target = forward ? t - t_begin_ : t_begin_ - t;
  auto it = std::upper_bound(steps_.begin(), steps_.end(), target,
                             [&](double v, const DenseStep& st) {
                               return v < (forward ? st.t0 - t_begin_ : t_begin_ - st.t0);
                             });
  if (it != steps_.begin()) --it;
  return *it;
}

Vector DenseSolution::state(double t) const { return locate(t).state(t); }
Vector DenseSolution::rate(double t) const { return locate(t).rate(t); }

OdeResult integrate_dop853(const OdeRhs& f, double t0, const Vector& y0, double t_end,
                           const OdeOptions& options, const OdeStop& stop) {
  if (!(options.rtol > 0.0) || !(options.atol > 0.0))
    throw UsageError("ode: tolerances must be positive");
  Stepper stepper{f};
  OdeResult result;
  std::vector<DenseStep> steps;
  double t = t0;
  Vector y = y0;
  const double span = std::abs(t_end - t0);
  if (span == 0.0) {
    result.t_final = t0;
    result.y_final = y0;
    return result;
  }
  const double direction = t_end > t0 ? 1.0 : -1.0;
  const double h_max = options.max_step > 0.0 ? std::min(options.max_step, span) : span;
  Vector k1 = stepper.eval(t, y);
  double h = options.initial_step > 0.0 ? std::min(options.initial_step, h_max)
                                        : initial_step(stepper, t, y, k1, direction, h_max, options);
  bool last_rejected = false;
  Trial trial;

  while (direction * (t_end - t) > 0.0) {
    if (result.accepted + result.rejected >= options.max_steps)
      throw StiffnessError("ode: step budget exhausted at t = " + format_number(t));
    const double h_floor = 1e-14 * std::max(1.0, std::abs(t));
    bool final_step = false;
    if (h >= std::abs(t_end - t)) {
      h = std::abs(t_end - t);
      final_step = true;
    }
    if (h < h_floor) {
      if (final_step) break;
      throw StiffnessError("ode: step size underflow at t = " + format_number(t));
    }
    const double hs = direction * h;
    bool domain_failure = false;
    DenseStep dense;
    try {
      attempt(stepper, t, y, k1, hs, options, trial);
      if (trial.err <= 1.0) dense = make_dense(stepper, t, y, hs, trial);
    } catch (const DomainError&) {
      domain_failure = true;
    }
    if (domain_failure) {
      ++result.rejected;
      h *= 0.25;
      last_rejected = true;
      if (h < h_floor) {
        result.truncated = true;
        break;
      }
      continue;
    }
    const double fac11 = std::pow(trial.err, 0.125);
    if (trial.err > 1.0) {
      ++result.rejected;
      h /= std::min(1.0 / kMinScale, fac11 / kSafety);
      last_rejected = true;
      continue;
    }
    ++result.accepted;
    double t_next = final_step ? t_end : t + hs;
    Vector y_next = trial.y_new;
    bool stopped = false;
    if (stop && stop(t_next, y_next)) {
      // First stopping time on the interpolant, by bisection.
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (stop(t + mid * hs, dense.state(t + mid * hs))) hi = mid;
        else lo = mid;
      }
      t_next = t + lo * hs;
      y_next = dense.state(t_next);
      stopped = true;
    }
    steps.push_back(std::move(dense));
    t = t_next;
    y = y_next;
    if (stopped) {
      result.truncated = true;
      break;
    }
    k1 = trial.k[13];
    double scale = fac11 == 0.0 ? kMaxScale : std::clamp(kSafety / fac11, kMinScale, kMaxScale);
    if (last_rejected) scale = std::min(scale, 1.0);
    h = std::min(h * scale, h_max);
    last_rejected = false;
    if (final_step) break;
  }
  result.solution = DenseSolution(std::move(steps), t0, t);
  result.t_final = t;
  result.y_final = y;
  result.evaluations = stepper.evaluations;
  return result;
}

}  // namespace finsler
