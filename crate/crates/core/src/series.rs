//! Truncated power series and the Frobenius recursion at a regular singular
//! point of `y'' + (P(t)/t) y' + k y = 0` with `P` even.

use num_complex::Complex64;

/// Cauchy product truncated to `n` terms.
pub fn mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (i, ai) in a.iter().enumerate().take(n) {
        for (j, bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Quotient `a / b` truncated to `n` terms; `b[0]` must be nonzero.
pub fn div(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut q = vec![0.0; n];
    for k in 0..n {
        let mut s = a.get(k).copied().unwrap_or(0.0);
        for j in 1..=k.min(b.len().saturating_sub(1)) {
            s -= b[j] * q[k - j];
        }
        q[k] = s / b[0];
    }
    q
}

fn factorial_series(n: usize, scale: f64, odd: bool) -> Vec<f64> {
    // sum_k scale^k u^k / (2k + odd)!
    let mut out = Vec::with_capacity(n);
    let mut term = 1.0;
    for k in 0..n {
        if k > 0 {
            let m = (2 * k + odd as usize) as f64;
            term *= scale / (m * (m - 1.0));
        }
        out.push(term);
    }
    out
}

/// Coefficients `p_j` of `t A'(t)/A(t) = sum_j p_j u^j`, `u = t^2`, for
/// `A = sinh^{2a+1} cosh^{2b+1} prod (cosh 2t + c)`.
///
/// With `trig = true` the expansion of `t Ã'(t)/Ã(t)` on the compact side is
/// returned instead, which is the same series at `-u`.
pub fn log_derivative_series(alpha: f64, beta: f64, roots: &[f64], n: usize, trig: bool) -> Vec<f64> {
    // sinh t / t = S(u), cosh t = C(u)
    let s1 = factorial_series(n, 1.0, true);
    let c1 = factorial_series(n, 1.0, false);
    let t_coth = div(&c1, &s1, n);
    let mut u_s1 = vec![0.0; n];
    u_s1[1..n].copy_from_slice(&s1[..n - 1]);
    let t_tanh = div(&u_s1, &c1, n);

    let mut p: Vec<f64> = (0..n)
        .map(|j| (2.0 * alpha + 1.0) * t_coth[j] + (2.0 * beta + 1.0) * t_tanh[j])
        .collect();

    if !roots.is_empty() {
        // t * 2 sinh 2t / (cosh 2t + c) = 4u S2(u) / (C2(u) + c)
        let s2 = factorial_series(n, 4.0, true);
        let c2 = factorial_series(n, 4.0, false);
        let mut num = vec![0.0; n];
        for k in 1..n {
            num[k] = 4.0 * s2[k - 1];
        }
        for &c in roots {
            let mut den = c2.clone();
            den[0] += c;
            let q = div(&num, &den, n);
            for j in 0..n {
                p[j] += q[j];
            }
        }
    }
    if trig {
        for (j, v) in p.iter_mut().enumerate() {
            if j % 2 == 1 {
                *v = -*v;
            }
        }
    }
    p
}

/// Even solution `f = sum f_k u^k`, `f_0 = 1`, of `f'' + (P/t) f' + k f = 0`
/// evaluated at `t` together with `f'(t)`. Terms are added until they drop
/// below `1e-17` relative to the running sum.
///
/// Returns `None` if the terms stop decreasing before convergence.
pub fn frobenius_even(p: &[f64], k: Complex64, t: f64) -> Option<(Complex64, Complex64)> {
    frobenius_even_at(p, k, Complex64::new(t, 0.0))
}

/// Same as [`frobenius_even`] at a complex point.
pub fn frobenius_even_at(p: &[f64], k: Complex64, z: Complex64) -> Option<(Complex64, Complex64)> {
    let u = z * z;
    let p0 = p[0];
    let max_terms = p.len();
    let mut f: Vec<Complex64> = Vec::with_capacity(max_terms);
    f.push(Complex64::new(1.0, 0.0));
    let mut val = Complex64::new(1.0, 0.0);
    let mut der_over_z = Complex64::new(0.0, 0.0);
    let mut upow = Complex64::new(1.0, 0.0);
    let mut prev_mag = f64::INFINITY;
    let mut small_run = 0;
    for kk in 1..max_terms {
        let kf = kk as f64;
        let mut rhs = -k * f[kk - 1];
        for j in 1..kk {
            rhs -= f[kk - j] * (p[j] * 2.0 * (kf - j as f64));
        }
        let fk = rhs / (2.0 * kf * (2.0 * kf - 1.0 + p0));
        f.push(fk);
        // d/dt u^k = 2k t^{2k-1} = 2k u^{k-1} t
        let dterm = fk * upow * (2.0 * kf);
        upow *= u;
        let term = fk * upow;
        val += term;
        der_over_z += dterm;
        let mag = term.norm().max((dterm * u).norm());
        let scale = val.norm().max(1e-300);
        if mag <= 1e-17 * scale {
            small_run += 1;
            if small_run >= 2 {
                return Some((val, der_over_z * z));
            }
        } else {
            small_run = 0;
            if kk > 8 && mag > prev_mag && mag > 1e-12 * scale {
                return None;
            }
        }
        prev_mag = mag;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_inverts_multiplication() {
        let a = [1.0, 2.0, -0.5, 3.0, 0.25];
        let b = [2.0, -1.0, 0.5, 0.0, 1.0];
        let p = mul(&a, &b, 5);
        let q = div(&p, &b, 5);
        for (x, y) in a.iter().zip(&q) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    fn eval(p: &[f64], u: f64) -> f64 {
        p.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    #[test]
    fn log_derivative_series_matches_closed_form() {
        let (a, b, roots) = (0.7, -0.2, [2.5, 1.3]);
        let p = log_derivative_series(a, b, &roots, 40, false);
        let t: f64 = 0.3;
        let mut exact = (2.0 * a + 1.0) * t / t.tanh() + (2.0 * b + 1.0) * t * t.tanh();
        for c in roots {
            exact += t * 2.0 * (2.0 * t).sinh() / ((2.0 * t).cosh() + c);
        }
        assert!((eval(&p, t * t) - exact).abs() < 1e-14, "{} {}", eval(&p, t * t), exact);

        let q = log_derivative_series(a, b, &roots, 40, true);
        let mut exact = (2.0 * a + 1.0) * t / t.tan() - (2.0 * b + 1.0) * t * t.tan();
        for c in roots {
            exact += -t * 2.0 * (2.0 * t).sin() / ((2.0 * t).cos() + c);
        }
        assert!((eval(&q, t * t) - exact).abs() < 1e-14);
    }

    #[test]
    fn frobenius_reduces_to_cosine() {
        // P = 0: f'' + k f = 0, but p0 = 0 is the alpha = -1/2 case
        let p = vec![0.0; 60];
        let (v, d) = frobenius_even(&p, Complex64::new(4.0, 0.0), 0.3).unwrap();
        assert!((v.re - 0.6f64.cos()).abs() < 1e-15);
        assert!((d.re + 2.0 * 0.6f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn frobenius_bessel_case() {
        // P = 1: Bessel J0(sqrt(k) t)
        let mut p = vec![0.0; 60];
        p[0] = 1.0;
        let (v, _) = frobenius_even(&p, Complex64::new(1.0, 0.0), 1.0).unwrap();
        assert!((v.re - 0.765_197_686_557_966_6).abs() < 1e-15);
    }
}
