//! Dormand–Prince 8(5,3) integrator with 7th-order dense output.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Step-size controls for [`Dop853`].
#[derive(Debug, Clone, Copy)]
pub struct Dop853Options<T> {
    pub rtol: T,
    pub atol: T,
    pub h_max: T,
    /// Initial step; `None` selects one automatically.
    pub h0: Option<T>,
    pub max_steps: usize,
}

impl<T: Real> Dop853Options<T> {
    pub fn with_tol(tol: T) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            h_max: T::infinity(),
            h0: None,
            max_steps: 1_000_000,
        }
    }
}

/// Continuous extension over one accepted step `[s0, s0 + h]`.
#[derive(Debug, Clone)]
pub struct DenseSegment<T, const N: usize> {
    pub s0: T,
    pub h: T,
    cont: [[T; N]; 8],
}

impl<T: Real, const N: usize> DenseSegment<T, N> {
    pub fn s_end(&self) -> T {
        self.s0 + self.h
    }

    /// State at the start of the step.
    pub fn start(&self) -> [T; N] {
        self.cont[0]
    }

    /// State at the end of the step.
    pub fn end(&self) -> [T; N] {
        std::array::from_fn(|i| self.cont[0][i] + self.cont[1][i])
    }

    pub fn eval(&self, s: T) -> [T; N] {
        let th = (s - self.s0) / self.h;
        let th1 = T::one() - th;
        let c = &self.cont;
        std::array::from_fn(|i| {
            let conpar = c[4][i] + th * (c[5][i] + th1 * (c[6][i] + th * c[7][i]));
            c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * conpar)))
        })
    }
}

/// Adaptive integrator for `dy/ds = f(s, y)` with a fixed-size state.
pub struct Dop853<T, const N: usize, F> {
    f: F,
    opts: Dop853Options<T>,
    s: T,
    y: [T; N],
    k1: [T; N],
    h: T,
    facold: T,
    rejected_last: bool,
    steps: usize,
    evals: usize,
}

#[inline]
fn axpy<T: Real, const N: usize>(y: &[T; N], h: T, terms: &[(f64, &[T; N])]) -> [T; N] {
    std::array::from_fn(|i| {
        let mut acc = T::zero();
        for (c, k) in terms {
            acc = acc + T::lit(*c) * k[i];
        }
        y[i] + h * acc
    })
}

#[inline]
fn comb<T: Real, const N: usize>(terms: &[(f64, &[T; N])]) -> [T; N] {
    std::array::from_fn(|i| terms.iter().fold(T::zero(), |acc, (c, k)| acc + T::lit(*c) * k[i]))
}

impl<T: Real, const N: usize, F: FnMut(T, &[T; N]) -> [T; N]> Dop853<T, N, F> {
    /// Prepares integration from `(s0, y0)` in the positive or negative
    /// direction given by `dir`.
    pub fn new(mut f: F, s0: T, y0: [T; N], dir: T, opts: Dop853Options<T>) -> Self {
        let k1 = f(s0, &y0);
        let mut me = Self {
            f,
            opts,
            s: s0,
            y: y0,
            k1,
            h: T::zero(),
            facold: T::lit(1e-4),
            rejected_last: false,
            steps: 0,
            evals: 1,
        };
        me.h = match opts.h0 {
            Some(h) => h.abs() * dir.signum(),
            None => me.initial_step(dir),
        };
        me
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn y(&self) -> &[T; N] {
        &self.y
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn set_h(&mut self, h: T) {
        self.h = h;
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn evals(&self) -> usize {
        self.evals
    }

    /// Replaces the current state, e.g. after an event.
    pub fn reset(&mut self, s: T, y: [T; N]) {
        self.s = s;
        self.y = y;
        self.k1 = (self.f)(s, &y);
        self.evals += 1;
        self.rejected_last = false;
    }

    fn initial_step(&mut self, dir: T) -> T {
        let (rtol, atol) = (self.opts.rtol, self.opts.atol);
        let mut dnf = T::zero();
        let mut dny = T::zero();
        for i in 0..N {
            let sk = atol + rtol * self.y[i].abs();
            dnf = dnf + (self.k1[i] / sk).powi(2);
            dny = dny + (self.y[i] / sk).powi(2);
        }
        let tiny = T::lit(1e-10);
        let mut h = if dnf <= tiny || dny <= tiny {
            T::lit(1e-6)
        } else {
            (dny / dnf).sqrt() * T::lit(0.01)
        };
        h = h.min(self.opts.h_max) * dir.signum();
        let y1 = axpy(&self.y, h, &[(1.0, &self.k1)]);
        let k2 = (self.f)(self.s + h, &y1);
        self.evals += 1;
        let mut der2 = T::zero();
        for i in 0..N {
            let sk = atol + rtol * self.y[i].abs();
            der2 = der2 + ((k2[i] - self.k1[i]) / sk).powi(2);
        }
        let der2 = der2.sqrt() / h.abs();
        let der12 = der2.max(dnf.sqrt());
        let h1 = if der12 <= T::lit(1e-15) {
            (h.abs() * T::lit(1e-3)).max(T::lit(1e-6))
        } else {
            (T::lit(0.01) / der12).powf(T::lit(0.125))
        };
        (T::lit(100.0) * h.abs()).min(h1).min(self.opts.h_max) * dir.signum()
    }

    /// Advances by one accepted step, never past `s_stop`, and returns the
    /// dense output of that step.
    pub fn step(&mut self, s_stop: T) -> Result<DenseSegment<T, N>> {
        let (rtol, atol) = (self.opts.rtol, self.opts.atol);
        let dir = (s_stop - self.s).signum();
        loop {
            if self.steps >= self.opts.max_steps {
                return Err(self.stalled());
            }
            let remaining = s_stop - self.s;
            let mut last = false;
            if self.h.abs() >= remaining.abs() {
                self.h = remaining;
                last = true;
            }
            let h = self.h;
            let floor = T::epsilon() * T::lit(16.0) * self.s.abs().max(T::one());
            if h.abs() <= floor && !last {
                return Err(self.stalled());
            }
            self.steps += 1;

            let (s, y, k1) = (self.s, self.y, self.k1);
            let f = &mut self.f;
            let k2 = f(s + T::lit(C2) * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f(s + T::lit(C3) * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(s + T::lit(C4) * h, &axpy(&y, h, &[(A41, &k1), (A43, &k3)]));
            let k5 = f(s + T::lit(C5) * h, &axpy(&y, h, &[(A51, &k1), (A53, &k3), (A54, &k4)]));
            let k6 = f(s + T::lit(C6) * h, &axpy(&y, h, &[(A61, &k1), (A64, &k4), (A65, &k5)]));
            let k7 = f(
                s + T::lit(C7) * h,
                &axpy(&y, h, &[(A71, &k1), (A74, &k4), (A75, &k5), (A76, &k6)]),
            );
            let k8 = f(
                s + T::lit(C8) * h,
                &axpy(&y, h, &[(A81, &k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]),
            );
            let k9 = f(
                s + T::lit(C9) * h,
                &axpy(
                    &y,
                    h,
                    &[(A91, &k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)],
                ),
            );
            let k10 = f(
                s + T::lit(C10) * h,
                &axpy(
                    &y,
                    h,
                    &[
                        (A101, &k1),
                        (A104, &k4),
                        (A105, &k5),
                        (A106, &k6),
                        (A107, &k7),
                        (A108, &k8),
                        (A109, &k9),
                    ],
                ),
            );
            let k11 = f(
                s + T::lit(C11) * h,
                &axpy(
                    &y,
                    h,
                    &[
                        (A111, &k1),
                        (A114, &k4),
                        (A115, &k5),
                        (A116, &k6),
                        (A117, &k7),
                        (A118, &k8),
                        (A119, &k9),
                        (A1110, &k10),
                    ],
                ),
            );
            let s_new = if last { s_stop } else { s + h };
            let yy1 = axpy(
                &y,
                h,
                &[
                    (A121, &k1),
                    (A124, &k4),
                    (A125, &k5),
                    (A126, &k6),
                    (A127, &k7),
                    (A128, &k8),
                    (A129, &k9),
                    (A1210, &k10),
                    (A1211, &k11),
                ],
            );
            let k12 = f(s_new, &yy1);
            self.evals += 11;
            let incr = comb(&[
                (B1, &k1),
                (B6, &k6),
                (B7, &k7),
                (B8, &k8),
                (B9, &k9),
                (B10, &k10),
                (B11, &k11),
                (B12, &k12),
            ]);
            let y_new: [T; N] = std::array::from_fn(|i| y[i] + h * incr[i]);

            let mut err = T::zero();
            let mut err2 = T::zero();
            let mut finite = true;
            for i in 0..N {
                let sk = atol + rtol * y[i].abs().max(y_new[i].abs());
                let e2 = incr[i] - T::lit(BHH1) * k1[i] - T::lit(BHH2) * k9[i] - T::lit(BHH3) * k12[i];
                err2 = err2 + (e2 / sk).powi(2);
                let e = T::lit(ER1) * k1[i]
                    + T::lit(ER6) * k6[i]
                    + T::lit(ER7) * k7[i]
                    + T::lit(ER8) * k8[i]
                    + T::lit(ER9) * k9[i]
                    + T::lit(ER10) * k10[i]
                    + T::lit(ER11) * k11[i]
                    + T::lit(ER12) * k12[i];
                err = err + (e / sk).powi(2);
                finite &= y_new[i].is_finite();
            }
            let mut deno = err + T::lit(0.01) * err2;
            if deno <= T::zero() {
                deno = T::one();
            }
            err = h.abs() * err * (T::one() / (deno * T::lit(N as f64))).sqrt();
            if !finite || !err.is_finite() {
                // Treat as a rejection with a strong reduction.
                self.h = h * T::lit(0.1);
                self.rejected_last = true;
                continue;
            }

            let fac11 = err.powf(T::lit(0.125));
            let facc1 = T::lit(1.0 / 0.333);
            let facc2 = T::lit(1.0 / 6.0);
            let safe = T::lit(0.9);
            let fac = facc2.max(facc1.min(fac11 / safe));
            let mut h_new = h / fac;

            if err <= T::one() {
                self.facold = err.max(T::lit(1e-4));
                let knew = f(s_new, &y_new);
                let k14 = f(
                    s + T::lit(C14) * h,
                    &axpy(
                        &y,
                        h,
                        &[
                            (A141, &k1),
                            (A147, &k7),
                            (A148, &k8),
                            (A149, &k9),
                            (A1410, &k10),
                            (A1411, &k11),
                            (A1412, &k12),
                            (A1413, &knew),
                        ],
                    ),
                );
                let k15 = f(
                    s + T::lit(C15) * h,
                    &axpy(
                        &y,
                        h,
                        &[
                            (A151, &k1),
                            (A156, &k6),
                            (A157, &k7),
                            (A158, &k8),
                            (A1511, &k11),
                            (A1512, &k12),
                            (A1513, &knew),
                            (A1514, &k14),
                        ],
                    ),
                );
                let k16 = f(
                    s + T::lit(C16) * h,
                    &axpy(
                        &y,
                        h,
                        &[
                            (A161, &k1),
                            (A166, &k6),
                            (A167, &k7),
                            (A168, &k8),
                            (A169, &k9),
                            (A1613, &knew),
                            (A1614, &k14),
                            (A1615, &k15),
                        ],
                    ),
                );
                self.evals += 4;
                let ks = [&k1, &k6, &k7, &k8, &k9, &k10, &k11, &k12, &knew, &k14, &k15, &k16];
                let dcoef = |d: &[f64; 12]| -> [T; N] {
                    std::array::from_fn(|i| {
                        let mut acc = T::zero();
                        for (c, k) in d.iter().zip(ks.iter()) {
                            acc = acc + T::lit(*c) * k[i];
                        }
                        acc * h
                    })
                };
                let ydiff: [T; N] = std::array::from_fn(|i| y_new[i] - y[i]);
                let bspl: [T; N] = std::array::from_fn(|i| h * k1[i] - ydiff[i]);
                let cont = [
                    y,
                    ydiff,
                    bspl,
                    std::array::from_fn(|i| ydiff[i] - h * knew[i] - bspl[i]),
                    dcoef(&D4),
                    dcoef(&D5),
                    dcoef(&D6),
                    dcoef(&D7),
                ];
                let seg = DenseSegment { s0: s, h, cont };
                if self.rejected_last {
                    h_new = if h_new.abs() < h.abs() { h_new } else { h };
                }
                self.rejected_last = false;
                self.s = s_new;
                self.y = y_new;
                self.k1 = knew;
                self.h = if last && h_new.abs() < T::epsilon() { h } else { h_new };
                if self.h.abs() > self.opts.h_max {
                    self.h = self.opts.h_max * dir;
                }
                return Ok(seg);
            }
            self.h = h / facc1.min(fac11 / safe);
            self.rejected_last = true;
        }
    }

    fn stalled(&self) -> Error {
        Error::StalledOrbit {
            s: self.s.to_f64().unwrap_or(f64::NAN),
            step: self.h.to_f64().unwrap_or(f64::NAN),
        }
    }
}

const D4: [f64; 12] = [D41, D46, D47, D48, D49, D410, D411, D412, D413, D414, D415, D416];
const D5: [f64; 12] = [D51, D56, D57, D58, D59, D510, D511, D512, D513, D514, D515, D516];
const D6: [f64; 12] = [D61, D66, D67, D68, D69, D610, D611, D612, D613, D614, D615, D616];
const D7: [f64; 12] = [D71, D76, D77, D78, D79, D710, D711, D712, D713, D714, D715, D716];

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;

const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;

const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;

const A141: f64 = 5.61675022830479523392909219681E-2;
const A147: f64 = 2.53500210216624811088794765333E-1;
const A148: f64 = -2.46239037470802489917441475441E-1;
const A149: f64 = -1.24191423263816360469010140626E-1;
const A1410: f64 = 1.5329179827876569731206322685E-1;
const A1411: f64 = 8.20105229563468988491666602057E-3;
const A1412: f64 = 7.56789766054569976138603589584E-3;
const A1413: f64 = -8.298E-3;

const A151: f64 = 3.18346481635021405060768473261E-2;
const A156: f64 = 2.83009096723667755288322961402E-2;
const A157: f64 = 5.35419883074385676223797384372E-2;
const A158: f64 = -5.49237485713909884646569340306E-2;
const A1511: f64 = -1.08347328697249322858509316994E-4;
const A1512: f64 = 3.82571090835658412954920192323E-4;
const A1513: f64 = -3.40465008687404560802977114492E-4;
const A1514: f64 = 1.41312443674632500278074618366E-1;
const A161: f64 = -4.28896301583791923408573538692E-1;
const A166: f64 = -4.69762141536116384314449447206E0;
const A167: f64 = 7.68342119606259904184240953878E0;
const A168: f64 = 4.06898981839711007970213554331E0;
const A169: f64 = 3.56727187455281109270669543021E-1;
const A1613: f64 = -1.39902416515901462129418009734E-3;
const A1614: f64 = 2.9475147891527723389556272149E0;
const A1615: f64 = -9.15095847217987001081870187138E0;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;
const C14: f64 = 0.1E+00;
const C15: f64 = 0.2E+00;
const C16: f64 = 0.777777777777777777777777777778E+00;

const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

const D41: f64 = -0.84289382761090128651353491142E+01;
const D46: f64 = 0.56671495351937776962531783590E+00;
const D47: f64 = -0.30689499459498916912797304727E+01;
const D48: f64 = 0.23846676565120698287728149680E+01;
const D49: f64 = 0.21170345824450282767155149946E+01;
const D410: f64 = -0.87139158377797299206789907490E+00;
const D411: f64 = 0.22404374302607882758541771650E+01;
const D412: f64 = 0.63157877876946881815570249290E+00;
const D413: f64 = -0.88990336451333310820698117400E-01;
const D414: f64 = 0.18148505520854727256656404962E+02;
const D415: f64 = -0.91946323924783554000451984436E+01;
const D416: f64 = -0.44360363875948939664310572000E+01;

const D51: f64 = 0.10427508642579134603413151009E+02;
const D56: f64 = 0.24228349177525818288430175319E+03;
const D57: f64 = 0.16520045171727028198505394887E+03;
const D58: f64 = -0.37454675472269020279518312152E+03;
const D59: f64 = -0.22113666853125306036270938578E+02;
const D510: f64 = 0.77334326684722638389603898808E+01;
const D511: f64 = -0.30674084731089398182061213626E+02;
const D512: f64 = -0.93321305264302278729567221706E+01;
const D513: f64 = 0.15697238121770843886131091075E+02;
const D514: f64 = -0.31139403219565177677282850411E+02;
const D515: f64 = -0.93529243588444783865713862664E+01;
const D516: f64 = 0.35816841486394083752465898540E+02;

const D61: f64 = 0.19985053242002433820987653617E+02;
const D66: f64 = -0.38703730874935176555105901742E+03;
const D67: f64 = -0.18917813819516756882830838328E+03;
const D68: f64 = 0.52780815920542364900561016686E+03;
const D69: f64 = -0.11573902539959630126141871134E+02;
const D610: f64 = 0.68812326946963000169666922661E+01;
const D611: f64 = -0.10006050966910838403183860980E+01;
const D612: f64 = 0.77771377980534432092869265740E+00;
const D613: f64 = -0.27782057523535084065932004339E+01;
const D614: f64 = -0.60196695231264120758267380846E+02;
const D615: f64 = 0.84320405506677161018159903784E+02;
const D616: f64 = 0.11992291136182789328035130030E+02;

const D71: f64 = -0.25693933462703749003312586129E+02;
const D76: f64 = -0.15418974869023643374053993627E+03;
const D77: f64 = -0.23152937917604549567536039109E+03;
const D78: f64 = 0.35763911791061412378285349910E+03;
const D79: f64 = 0.93405324183624310003907691704E+02;
const D710: f64 = -0.37458323136451633156875139351E+02;
const D711: f64 = 0.10409964950896230045147246184E+03;
const D712: f64 = 0.29840293426660503123344363579E+02;
const D713: f64 = -0.43533456590011143754432175058E+02;
const D714: f64 = 0.96324553959188282948394950600E+02;
const D715: f64 = -0.39177261675615439165231486172E+02;
const D716: f64 = -0.14972683625798562581422125276E+03;
