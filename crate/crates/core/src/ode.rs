//! Explicit Runge-Kutta integration with the Dormand-Prince 8(5,3) pair.
//!
//! The state is a fixed-size real array; complex systems are split into real
//! and imaginary parts by the caller. The driver can be asked to land exactly
//! on a sorted list of output abscissae, which replaces dense output: every
//! requested point is a step boundary, so values there carry the full
//! eighth-order accuracy.

use crate::error::{Error, Result};

/// Step-size control parameters.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Fraction of the state's max-norm added to the absolute tolerance.
    /// Keeps oscillating components from forcing tiny steps near their zeros.
    pub norm_floor: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 0.0,
            norm_floor: 1e-3,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

impl OdeOptions {
    pub fn with_rtol(rtol: f64) -> Self {
        Self {
            rtol,
            ..Self::default()
        }
    }
}

/// Summary of a completed integration.
#[derive(Debug, Clone)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Sum of the accepted local error estimates (absolute, max-norm scaled).
    pub est_error: f64,
}

const C: [f64; 12] = [
    0.0,
    0.526001519587677318785587544488E-01,
    0.789002279381515978178381316732E-01,
    0.118350341907227396726757197510E+00,
    0.281649658092772603273242802490E+00,
    0.333333333333333333333333333333E+00,
    0.25E+00,
    0.307692307692307692307692307692E+00,
    0.651282051282051282051282051282E+00,
    0.6E+00,
    0.857142857142857142857142857142E+00,
    1.0,
];

// Lower-triangular stage matrix, row i holds a_{i+1, 1..=i}.
const A: [&[f64]; 12] = [
    &[],
    &[5.26001519587677318785587544488E-2],
    &[
        1.97250569845378994544595329183E-2,
        5.91751709536136983633785987549E-2,
    ],
    &[
        2.95875854768068491816892993775E-2,
        0.0,
        8.87627564304205475450678981324E-2,
    ],
    &[
        2.41365134159266685502369798665E-1,
        0.0,
        -8.84549479328286085344864962717E-1,
        9.24834003261792003115737966543E-1,
    ],
    &[
        3.7037037037037037037037037037E-2,
        0.0,
        0.0,
        1.70828608729473871279604482173E-1,
        1.25467687566822425016691814123E-1,
    ],
    &[
        3.7109375E-2,
        0.0,
        0.0,
        1.70252211019544039314978060272E-1,
        6.02165389804559606850219397283E-2,
        -1.7578125E-2,
    ],
    &[
        3.70920001185047927108779319836E-2,
        0.0,
        0.0,
        1.70383925712239993810214054705E-1,
        1.07262030446373284651809199168E-1,
        -1.53194377486244017527936158236E-2,
        8.27378916381402288758473766002E-3,
    ],
    &[
        6.24110958716075717114429577812E-1,
        0.0,
        0.0,
        -3.36089262944694129406857109825E0,
        -8.68219346841726006818189891453E-1,
        2.75920996994467083049415600797E1,
        2.01540675504778934086186788979E1,
        -4.34898841810699588477366255144E1,
    ],
    &[
        4.77662536438264365890433908527E-1,
        0.0,
        0.0,
        -2.48811461997166764192642586468E0,
        -5.90290826836842996371446475743E-1,
        2.12300514481811942347288949897E1,
        1.52792336328824235832596922938E1,
        -3.32882109689848629194453265587E1,
        -2.03312017085086261358222928593E-2,
    ],
    &[
        -9.3714243008598732571704021658E-1,
        0.0,
        0.0,
        5.18637242884406370830023853209E0,
        1.09143734899672957818500254654E0,
        -8.14978701074692612513997267357E0,
        -1.85200656599969598641566180701E1,
        2.27394870993505042818970056734E1,
        2.49360555267965238987089396762E0,
        -3.0467644718982195003823669022E0,
    ],
    &[
        2.27331014751653820792359768449E0,
        0.0,
        0.0,
        -1.05344954667372501984066689879E1,
        -2.00087205822486249909675718444E0,
        -1.79589318631187989172765950534E1,
        2.79488845294199600508499808837E1,
        -2.85899827713502369474065508674E0,
        -8.87285693353062954433549289258E0,
        1.23605671757943030647266201528E1,
        6.43392746015763530355970484046E-1,
    ],
];

const B: [f64; 12] = [
    5.42937341165687622380535766363E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566E0,
    1.89151789931450038304281599044E0,
    -5.8012039600105847814672114227E0,
    3.1116436695781989440891606237E-1,
    -1.52160949662516078556178806805E-1,
    2.01365400804030348374776537501E-1,
    4.47106157277725905176885569043E-2,
];

// Third-order embedded weights on stages 1, 9, 12.
const BHH: [f64; 3] = [
    0.244094488188976377952755905512E+00,
    0.733846688281611857341361741547E+00,
    0.220588235294117647058823529412E-01,
];

// Fifth-order error weights on stages 1..=12.
const E: [f64; 12] = [
    0.1312004499419488073250102996E-01,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753E+01,
    -0.4957589496572501915214079952E+00,
    0.1664377182454986536961530415E+01,
    -0.3503288487499736816886487290E+00,
    0.3341791187130174790297318841E+00,
    0.8192320648511571246570742613E-01,
    -0.2235530786388629525884427845E-01,
];

fn max_norm<const N: usize>(y: &[f64; N]) -> f64 {
    y.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Integrates `y' = f(x, y)` from `x0` to the last entry of `stops`, landing on
/// every entry. `stops` must be monotone in the direction of integration.
/// `on_stop` receives the stop index and state; `on_step` receives every
/// accepted step end (including stops).
pub fn integrate_with<const N: usize, F, S, P>(
    f: F,
    x0: f64,
    y0: [f64; N],
    stops: &[f64],
    opts: &OdeOptions,
    mut on_stop: S,
    mut on_step: P,
) -> Result<([f64; N], OdeStats)>
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
    S: FnMut(usize, &[f64; N]),
    P: FnMut(f64, &[f64; N]),
{
    let mut stats = OdeStats {
        accepted: 0,
        rejected: 0,
        est_error: 0.0,
    };
    let Some(&x_end) = stops.last() else {
        return Ok((y0, stats));
    };
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    let span = (x_end - x0).abs();
    let mut x = x0;
    let mut y = y0;
    let mut stop_idx = 0;
    // stops that coincide with the start are emitted immediately
    while stop_idx < stops.len() && (stops[stop_idx] - x0) * dir <= 0.0 {
        on_stop(stop_idx, &y);
        stop_idx += 1;
    }
    if stop_idx == stops.len() {
        return Ok((y, stats));
    }
    if !y.iter().all(|v| v.is_finite()) {
        return Err(Error::Integration {
            at: x0,
            reason: "non-finite initial state".into(),
        });
    }

    let h_max = opts.h_max.min(span);
    let mut h = opts.h_init.unwrap_or(1e-2 * span).min(h_max).max(1e-14 * span) * dir;
    let mut k = [[0.0f64; N]; 12];
    f(x, &y, &mut k[0]);
    let mut last_rejected = false;
    let mut ytmp = [0.0f64; N];

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integration {
                at: x,
                reason: format!("maximum number of steps ({}) reached", opts.max_steps),
            });
        }
        let target = stops[stop_idx];
        let mut hit_stop = false;
        let h_free = h;
        if (x + 1.01 * h - target) * dir >= 0.0 {
            h = target - x;
            hit_stop = true;
        }
        if h.abs() <= 1e-15 * x.abs().max(1.0) {
            return Err(Error::Integration {
                at: x,
                reason: "step size underflow".into(),
            });
        }

        for s in 1..12 {
            for i in 0..N {
                let mut acc = 0.0;
                for (j, a) in A[s].iter().enumerate() {
                    if *a != 0.0 {
                        acc += a * k[j][i];
                    }
                }
                ytmp[i] = y[i] + h * acc;
            }
            f(x + C[s] * h, &ytmp, &mut k[s]);
        }

        let mut y_new = [0.0f64; N];
        let mut err_est = [0.0f64; N];
        let mut err_bhh = [0.0f64; N];
        for i in 0..N {
            let mut incr = 0.0;
            let mut e = 0.0;
            for s in 0..12 {
                incr += B[s] * k[s][i];
                e += E[s] * k[s][i];
            }
            y_new[i] = y[i] + h * incr;
            err_est[i] = e;
            err_bhh[i] = incr - BHH[0] * k[0][i] - BHH[1] * k[8][i] - BHH[2] * k[11][i];
        }

        let floor = opts.atol + opts.rtol * opts.norm_floor * max_norm(&y).max(max_norm(&y_new));
        let mut err = 0.0;
        let mut err2 = 0.0;
        let mut scale_max = 0.0f64;
        for i in 0..N {
            let sc = floor + opts.rtol * y[i].abs().max(y_new[i].abs());
            let sc = if sc > 0.0 { sc } else { f64::MIN_POSITIVE };
            scale_max = scale_max.max(sc);
            err += (err_est[i] / sc).powi(2);
            err2 += (err_bhh[i] / sc).powi(2);
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err * (1.0 / (deno * N as f64)).sqrt();
        if !err.is_finite() {
            // shrink aggressively on overflow / NaN inside the stages
            h *= 0.1;
            stats.rejected += 1;
            last_rejected = true;
            continue;
        }

        // growth factor h_new / h, bounded in [1/3, 6]
        let fac11 = err.powf(0.125);
        let grow = (0.9 / fac11).clamp(1.0 / 3.0, 6.0);
        if err <= 1.0 {
            stats.accepted += 1;
            stats.est_error += err * scale_max;
            x = if hit_stop { target } else { x + h };
            y = y_new;
            if !y.iter().all(|v| v.is_finite()) {
                return Err(Error::Integration {
                    at: x,
                    reason: "non-finite state".into(),
                });
            }
            f(x, &y, &mut k[0]);
            on_step(x, &y);
            if hit_stop {
                on_stop(stop_idx, &y);
                stop_idx += 1;
                while stop_idx < stops.len() && (stops[stop_idx] - x) * dir <= 0.0 {
                    on_stop(stop_idx, &y);
                    stop_idx += 1;
                }
                if stop_idx == stops.len() {
                    return Ok((y, stats));
                }
            }
            let grow = if last_rejected { grow.min(1.0) } else { grow };
            last_rejected = false;
            // a step shortened to land on a stop says little about the next one
            let proposal = if hit_stop { (h * grow).abs().max(h_free.abs()) } else { (h * grow).abs() };
            h = proposal.min(h_max) * dir;
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h *= grow.min(1.0);
        }
    }
}

/// Integrates to `x_end` and returns the final state.
pub fn integrate<const N: usize, F>(
    f: F,
    x0: f64,
    y0: [f64; N],
    x_end: f64,
    opts: &OdeOptions,
) -> Result<([f64; N], OdeStats)>
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    integrate_with(f, x0, y0, &[x_end], opts, |_, _| {}, |_, _| {})
}

/// Integrates through the sorted `points` and returns the state at each.
pub fn integrate_to_points<const N: usize, F>(
    f: F,
    x0: f64,
    y0: [f64; N],
    points: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<[f64; N]>, OdeStats)>
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    let mut out = vec![[0.0; N]; points.len()];
    let (_, stats) = integrate_with(f, x0, y0, points, opts, |i, y| out[i] = *y, |_, _| {})?;
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_is_accurate() {
        let (y, stats) = integrate(
            |_, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = y[0],
            0.0,
            [1.0],
            3.0,
            &OdeOptions::with_rtol(1e-13),
        )
        .unwrap();
        assert!((y[0] - 3f64.exp()).abs() < 1e-11 * 3f64.exp(), "{}", y[0]);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn harmonic_oscillator_long_run() {
        let w = 20.0;
        let (y, _) = integrate(
            move |_, y: &[f64; 2], dy: &mut [f64; 2]| {
                dy[0] = y[1];
                dy[1] = -w * w * y[0];
            },
            0.0,
            [1.0, 0.0],
            10.0,
            &OdeOptions::with_rtol(1e-12),
        )
        .unwrap();
        assert!((y[0] - (w * 10.0).cos()).abs() < 1e-9, "{}", y[0]);
        assert!((y[1] + w * (w * 10.0).sin()).abs() < 1e-8 * w);
    }

    #[test]
    fn nonautonomous_stage_times() {
        // y' = cos(x) x^2 exercises every stage abscissa
        let (y, _) = integrate(
            |x, _y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = x * x * x.cos(),
            0.0,
            [0.0],
            2.0,
            &OdeOptions::with_rtol(1e-13),
        )
        .unwrap();
        // antiderivative: (x^2 - 2) sin x + 2x cos x
        let exact = (4.0 - 2.0) * 2f64.sin() + 4.0 * 2f64.cos();
        assert!((y[0] - exact).abs() < 1e-12, "{} vs {}", y[0], exact);
    }

    #[test]
    fn lands_on_every_stop_backwards() {
        let pts = [0.9, 0.5, 0.5, 0.1];
        let (out, _) = integrate_to_points(
            |_, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = -y[0],
            1.0,
            [1.0],
            &pts,
            &OdeOptions::with_rtol(1e-13),
        )
        .unwrap();
        for (p, y) in pts.iter().zip(&out) {
            assert!((y[0] - (1.0 - p).exp()).abs() < 1e-12);
        }
    }
}
