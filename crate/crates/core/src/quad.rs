//! Quadrature: adaptive Gauss-Kronrod on intervals and Gauss-Legendre rules.

use crate::error::{Error, Result};
use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// The 15 Kronrod abscissae on [-1, 1] in increasing order.
fn kronrod_nodes() -> [f64; 15] {
    let mut x = [0.0; 15];
    for i in 0..7 {
        x[i] = -XGK[i];
        x[14 - i] = XGK[i];
    }
    x
}

#[derive(Debug, Clone)]
pub struct QuadResult<const M: usize> {
    pub value: [Complex64; M],
    pub error: f64,
    pub evaluations: usize,
}

struct Panel<const M: usize> {
    a: f64,
    b: f64,
    value: [Complex64; M],
    error: f64,
}

fn gk15<const M: usize, F>(f: &F, a: f64, b: f64) -> Result<Panel<M>>
where
    F: Fn(&[f64]) -> Result<Vec<[Complex64; M]>>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let xs: Vec<f64> = kronrod_nodes().iter().map(|x| c + h * x).collect();
    let fx = f(&xs)?;
    let mut k = [Complex64::new(0.0, 0.0); M];
    let mut g = [Complex64::new(0.0, 0.0); M];
    for i in 0..15 {
        let j = if i < 7 { i } else { 14 - i };
        let wk = WGK[j];
        // Gauss nodes sit at odd j, plus the centre
        let wg = if j % 2 == 1 { WG[j / 2] } else if j == 7 { WG[3] } else { 0.0 };
        for m in 0..M {
            k[m] += fx[i][m] * wk;
            g[m] += fx[i][m] * wg;
        }
    }
    let mut err = 0.0f64;
    for m in 0..M {
        k[m] *= h;
        g[m] *= h;
        err = err.max((k[m] - g[m]).norm());
    }
    Ok(Panel {
        a,
        b,
        value: k,
        error: err,
    })
}

/// Adaptive Gauss-Kronrod integration of a vector of `M` complex integrands
/// over `[a, b]`. The callback receives all 15 abscissae of a panel at once
/// so it can evaluate them in parallel.
pub fn integrate_vec<const M: usize, F>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadResult<M>>
where
    F: Fn(&[f64]) -> Result<Vec<[Complex64; M]>>,
{
    integrate_vec_breaks(f, &[a, b], abs_tol, rel_tol, max_panels)
}

/// As [`integrate_vec`] with initial panel boundaries given by `breaks`.
pub fn integrate_vec_breaks<const M: usize, F>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadResult<M>>
where
    F: Fn(&[f64]) -> Result<Vec<[Complex64; M]>>,
{
    let mut panels: Vec<Panel<M>> = Vec::new();
    for w in breaks.windows(2) {
        panels.push(gk15(&f, w[0], w[1])?);
    }
    let mut evaluations = 15 * panels.len();
    loop {
        let mut total = [Complex64::new(0.0, 0.0); M];
        let mut err = 0.0;
        for p in &panels {
            for m in 0..M {
                total[m] += p.value[m];
            }
            err += p.error;
        }
        let mag = total.iter().fold(0.0f64, |s, v| s.max(v.norm()));
        if err <= abs_tol.max(rel_tol * mag) {
            return Ok(QuadResult {
                value: total,
                error: err,
                evaluations,
            });
        }
        if panels.len() >= max_panels {
            return Err(Error::NonConvergence(format!(
                "adaptive quadrature: error {err:e} after {} panels",
                panels.len()
            )));
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .unwrap();
        let worst = panels.swap_remove(idx);
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::NonConvergence("adaptive quadrature: interval too small".into()));
        }
        panels.push(gk15(&f, worst.a, mid)?);
        panels.push(gk15(&f, mid, worst.b)?);
        evaluations += 30;
    }
}

/// Scalar real convenience wrapper.
pub fn integrate_real<F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let r = integrate_vec::<1, _>(
        |xs| Ok(xs.iter().map(|&x| [Complex64::new(f(x), 0.0)]).collect()),
        a,
        b,
        abs_tol,
        rel_tol,
        100_000,
    )?;
    Ok((r.value[0].re, r.error))
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 0 { 0.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss-Legendre rule on `[a, b]` with geometric grading towards
/// the ends flagged in `graded` (left, right). Panels shrink by a factor of 4
/// over `levels` steps near a graded end.
pub fn composite_rule(
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
    graded: (bool, bool),
    levels: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut edges: Vec<f64> = (0..=panels)
        .map(|i| a + (b - a) * i as f64 / panels as f64)
        .collect();
    let h = (b - a) / panels as f64;
    if graded.0 {
        let mut extra: Vec<f64> = (1..=levels).map(|k| a + h * 0.25f64.powi(k as i32)).collect();
        extra.reverse();
        edges.splice(1..1, extra);
    }
    if graded.1 {
        let n = edges.len();
        let extra: Vec<f64> = (1..=levels).map(|k| b - h * 0.25f64.powi(k as i32)).collect();
        edges.splice(n - 1..n - 1, extra);
    }
    let (gx, gw) = gauss_legendre(order);
    let mut xs = Vec::with_capacity(edges.len() * order);
    let mut ws = Vec::with_capacity(edges.len() * order);
    for e in edges.windows(2) {
        let c = 0.5 * (e[0] + e[1]);
        let hh = 0.5 * (e[1] - e[0]);
        for (x, w) in gx.iter().zip(&gw) {
            xs.push(c + hh * x);
            ws.push(hh * w);
        }
    }
    (xs, ws)
}
