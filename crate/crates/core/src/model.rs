//! Problem definition: the coefficient `A(z) = sinh^{2α+1} z cosh^{2β+1} z B(z)`
//! with `B(z) = ∏ (cosh 2z + c_i) / ∏ (1 + c_i)`, its compact dual
//! `Ã(t) = sin^{2α+1} t cos^{2β+1} t B̃(t)`, and derived constants.

use crate::error::{Error, Result};
use crate::quad;
use crate::series;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// The serializable part of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub roots: Vec<f64>,
    #[serde(default = "default_series_order")]
    pub series_order: usize,
}

fn default_series_order() -> usize {
    16
}

/// Which coefficient [`Model::eval_coefficient`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficient {
    A,
    ATilde,
    B,
    LogDerivA,
    LogDerivATilde,
}

/// Which potential [`Model::eval_liouville_data`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiouvilleData {
    Q,
    Chi,
    G,
}

/// Numerical checks run when a model is built.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    /// min of A on the sample grid in (0, 20]
    pub min_a_real: f64,
    /// min of Re B over the sampled closed strip
    pub min_b_strip: f64,
    /// max |B(z) - B(-z)| over the strip grid
    pub evenness_error: f64,
    /// max |B(iπ/2 + w) - B(iπ/2 - w)| for small w
    pub evenness_half_period_error: f64,
    /// log-linear fit of |A'/A - 2ρ| on [5, 15]; `None` when the residual vanishes
    pub fitted_decay: Option<f64>,
    /// ∫_0^20 |G| along the real axis and its change when the rule is refined
    pub g_integral_real: f64,
    pub g_integral_refinement: f64,
    /// ∫ |G| along Im z = ±π/6, Re z ∈ [0.05, 20]
    pub g_integral_lines: [f64; 2],
}

impl ConditionReport {
    pub fn all_ok(&self) -> bool {
        self.min_a_real > 0.0
            && self.min_b_strip > 0.0
            && self.evenness_error < 1e-12
            && self.evenness_half_period_error < 1e-10
            && self.g_integral_real.is_finite()
            && self.g_integral_refinement < 1e-6 * (1.0 + self.g_integral_real)
            && self.g_integral_lines.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    pub alpha: f64,
    pub beta: f64,
    pub perturbation_roots: Vec<f64>,
    pub series_order: usize,
    /// α + β + 1 + b_0
    pub rho: f64,
    /// α + β + 1
    pub rho0: f64,
    pub delta_decay: f64,
    pub theta: f64,
    /// b_0..b_J with B'/B = Σ 2 b_j e^{-jt}, J = 2·series_order
    pub exp_coeffs: Vec<f64>,
    /// A(t) ~ kappa e^{2ρt} as t → ∞
    pub kappa: f64,
    /// ν (printed-potential convention) minus the eigenvalue of −L
    pub nu_shift: f64,
    pub report: ConditionReport,
}

/// `build_model` with validation and the condition report.
pub fn build_model(alpha: f64, beta: f64, roots: &[f64], series_order: usize) -> Result<Model> {
    // the boundary value -1/2 is kept: it is the flat case A = B
    if !(alpha >= -0.5) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be at least -1/2")));
    }
    if !(beta >= -0.5) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta = {beta} must be at least -1/2")));
    }
    if let Some(c) = roots.iter().find(|c| !(**c > 1.0) || !c.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "perturbation root {c} must exceed 1"
        )));
    }
    if series_order < 8 {
        return Err(Error::InvalidParameter(format!(
            "series_order = {series_order} must be at least 8"
        )));
    }
    let exp_coeffs = exp_coefficients(roots, 2 * series_order);
    let rho0 = alpha + beta + 1.0;
    let rho = rho0 + exp_coeffs[0];
    let kappa = 2f64.powf(-2.0 * rho0) * roots.iter().map(|c| 0.5 / (1.0 + c)).product::<f64>();
    let mut model = Model {
        alpha,
        beta,
        perturbation_roots: roots.to_vec(),
        series_order,
        rho,
        rho0,
        delta_decay: 2.0,
        theta: 0.0,
        exp_coeffs,
        kappa,
        nu_shift: 2.0 * (alpha + 1.0) * (beta + 1.0) - 0.5,
        report: ConditionReport {
            min_a_real: 0.0,
            min_b_strip: 0.0,
            evenness_error: 0.0,
            evenness_half_period_error: 0.0,
            fitted_decay: None,
            g_integral_real: 0.0,
            g_integral_refinement: 0.0,
            g_integral_lines: [0.0; 2],
        },
    };
    model.theta = model.theta_constant()?;
    model.report = model.check_conditions()?;
    Ok(model)
}

/// b_0..b_len of B'/B = Σ 2 b_j e^{-jt} by series division in x = e^{-2t}.
fn exp_coefficients(roots: &[f64], len: usize) -> Vec<f64> {
    let half = len / 2 + 1;
    let mut b = vec![0.0; len + 1];
    for &c in roots {
        // 2 sinh 2t / (cosh 2t + c) = 2 (1 - x^2) / (1 + 2cx + x^2)
        let q = series::div(&[1.0, 0.0, -1.0], &[1.0, 2.0 * c, 1.0], half);
        for (k, v) in q.iter().enumerate() {
            if 2 * k <= len {
                b[2 * k] += v;
            }
        }
    }
    b
}

impl Model {
    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        build_model(spec.alpha, spec.beta, &spec.roots, spec.series_order)
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec {
            alpha: self.alpha,
            beta: self.beta,
            roots: self.perturbation_roots.clone(),
            series_order: self.series_order,
        }
    }

    /// Coefficients a_0..a_n of A'/A = Σ a_k e^{-kt} (a_0 = 2ρ, odd ones vanish).
    pub fn a_coeffs(&self, n: usize) -> Vec<f64> {
        let b = if n <= self.exp_coeffs.len() - 1 {
            self.exp_coeffs.clone()
        } else {
            exp_coefficients(&self.perturbation_roots, n)
        };
        let mut a = vec![0.0; n + 1];
        a[0] = 2.0 * self.rho;
        for k in (2..=n).step_by(2) {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            a[k] = 2.0 * (2.0 * self.alpha + 1.0) + 2.0 * (2.0 * self.beta + 1.0) * sign + 2.0 * b[k];
        }
        a
    }

    /// Coefficients of t·A'/A (or t·Ã'/Ã with `trig`) in powers of t².
    /// `right` gives the expansion about π/2 in s = π/2 − t on the compact side.
    pub fn frobenius_coeffs(&self, n: usize, trig: bool, right: bool) -> Vec<f64> {
        if right {
            let flipped: Vec<f64> = self.perturbation_roots.iter().map(|c| -c).collect();
            series::log_derivative_series(self.beta, self.alpha, &flipped, n, trig)
        } else {
            series::log_derivative_series(self.alpha, self.beta, &self.perturbation_roots, n, trig)
        }
    }

    /// Radius (in t) within which the endpoint series converge comfortably.
    pub fn series_radius(&self) -> f64 {
        let cmin = self
            .perturbation_roots
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let r = if cmin.is_finite() { 0.5 * cmin.acosh() } else { f64::INFINITY };
        r.min(FRAC_PI_2)
    }

    pub fn b(&self, z: Complex64) -> Complex64 {
        let w = (2.0 * z).cosh();
        self.perturbation_roots
            .iter()
            .fold(Complex64::new(1.0, 0.0), |p, &c| p * (w + c) / (1.0 + c))
    }

    /// B'/B
    pub fn h(&self, z: Complex64) -> Complex64 {
        let (s, w) = ((2.0 * z).sinh(), (2.0 * z).cosh());
        self.perturbation_roots
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc + 2.0 * s / (w + c))
    }

    fn h_real(&self, t: f64) -> (f64, f64, f64) {
        // B'/B, (B'/B)', B''/B
        let (s, w) = ((2.0 * t).sinh(), (2.0 * t).cosh());
        let mut h = 0.0;
        let mut dh = 0.0;
        for &c in &self.perturbation_roots {
            h += 2.0 * s / (w + c);
            dh += 4.0 * (1.0 + c * w) / ((w + c) * (w + c));
        }
        (h, dh, dh + h * h)
    }

    /// (g̃, g̃') with g̃ = B̃'/B̃ on the compact side.
    pub fn g_tilde(&self, t: f64) -> (f64, f64) {
        let (s, w) = ((2.0 * t).sin(), (2.0 * t).cos());
        let mut g = 0.0;
        let mut dg = 0.0;
        for &c in &self.perturbation_roots {
            g -= 2.0 * s / (w + c);
            dg -= 4.0 * (1.0 + c * w) / ((w + c) * (w + c));
        }
        (g, dg)
    }

    /// A'/A at complex z.
    pub fn logderiv_a(&self, z: Complex64) -> Complex64 {
        (2.0 * self.alpha + 1.0) / z.tanh() + (2.0 * self.beta + 1.0) * z.tanh() + self.h(z)
    }

    pub fn logderiv_a_real(&self, t: f64) -> f64 {
        (2.0 * self.alpha + 1.0) / t.tanh() + (2.0 * self.beta + 1.0) * t.tanh() + self.h_real(t).0
    }

    /// Ã'/Ã on (0, π/2).
    pub fn logderiv_a_tilde(&self, t: f64) -> f64 {
        (2.0 * self.alpha + 1.0) / t.tan() - (2.0 * self.beta + 1.0) * t.tan() + self.g_tilde(t).0
    }

    pub fn a_real(&self, t: f64) -> f64 {
        t.sinh().powf(2.0 * self.alpha + 1.0) * t.cosh().powf(2.0 * self.beta + 1.0) * self.b(Complex64::new(t, 0.0)).re
    }

    pub fn a_tilde(&self, t: f64) -> f64 {
        let bt: f64 = self
            .perturbation_roots
            .iter()
            .map(|c| ((2.0 * t).cos() + c) / (1.0 + c))
            .product();
        t.sin().powf(2.0 * self.alpha + 1.0) * t.cos().powf(2.0 * self.beta + 1.0) * bt
    }

    pub fn eval_coefficient(&self, z: Complex64, which: Coefficient) -> Result<Complex64> {
        match which {
            Coefficient::A | Coefficient::B | Coefficient::LogDerivA => {
                if !(z.im.abs() < FRAC_PI_2) {
                    return Err(Error::Domain(format!("{z} outside the strip |Im z| < π/2")));
                }
            }
            Coefficient::ATilde | Coefficient::LogDerivATilde => {
                if z.im != 0.0 || !(z.re > 0.0 && z.re < FRAC_PI_2) {
                    return Err(Error::Domain(format!("{z} outside (0, π/2)")));
                }
            }
        }
        Ok(match which {
            Coefficient::B => self.b(z),
            Coefficient::A => {
                if z == Complex64::new(0.0, 0.0) {
                    return Ok(if self.alpha == -0.5 { self.b(z) } else { Complex64::new(0.0, 0.0) });
                }
                z.sinh().powf(2.0 * self.alpha + 1.0) * z.cosh().powf(2.0 * self.beta + 1.0) * self.b(z)
            }
            Coefficient::LogDerivA => {
                if z.norm() < 1e-300 {
                    return Err(Error::Pole("A'/A at z = 0".into()));
                }
                self.logderiv_a(z)
            }
            Coefficient::ATilde => Complex64::new(self.a_tilde(z.re), 0.0),
            Coefficient::LogDerivATilde => Complex64::new(self.logderiv_a_tilde(z.re), 0.0),
        })
    }

    /// χ(t) on (0, π/2).
    pub fn chi(&self, t: f64) -> f64 {
        if self.perturbation_roots.is_empty() {
            return 0.0;
        }
        let (g, dg) = self.g_tilde(t);
        -(self.alpha + 0.5) * g / t.tan() + (self.beta + 0.5) * g * t.tan() - 0.25 * g * g - 0.5 * dg
    }

    /// The potential q of the Liouville normal form −v'' + q v = ν v.
    pub fn q(&self, t: f64) -> f64 {
        let (ct, tt) = (1.0 / t.tan(), t.tan());
        (self.alpha.powi(2) - 0.25) * ct * ct + (self.beta.powi(2) - 0.25) * tt * tt - self.chi(t)
    }

    /// G on the real axis, via the split G_0 + B-terms.
    pub fn g(&self, t: f64) -> f64 {
        let (a, b) = (self.alpha + 0.5, self.beta + 0.5);
        let (ct, tt) = (1.0 / t.tanh(), t.tanh());
        // (α² − 1/4)(coth² t − 1/t²) with the removable singularity expanded
        let sing = if t < 1e-3 {
            let u = t * t;
            (self.alpha.powi(2) - 0.25) * (2.0 / 3.0 - u / 15.0 + 2.0 * u * u / 189.0)
        } else {
            (self.alpha.powi(2) - 0.25) * (ct * ct - 1.0 / (t * t))
        };
        let g0 = sing + (b * b - b) * tt * tt + a + b + 2.0 * a * b - self.rho * self.rho;
        if self.perturbation_roots.is_empty() {
            return g0;
        }
        let (h, _, b2) = self.h_real(t);
        g0 + b * tt * h + a * ct * h - 0.25 * h * h + 0.5 * b2
    }

    /// G at complex z in the strip, from the direct formula.
    pub fn g_complex(&self, z: Complex64) -> Complex64 {
        let (a, b) = (2.0 * self.alpha + 1.0, 2.0 * self.beta + 1.0);
        let l = self.logderiv_a(z);
        let w = (2.0 * z).cosh();
        let mut dl = -a / (z.sinh() * z.sinh()) + b / (z.cosh() * z.cosh());
        for &c in &self.perturbation_roots {
            dl += 4.0 * (1.0 + c * w) / ((w + c) * (w + c));
        }
        0.25 * l * l + 0.5 * dl - self.rho * self.rho - (self.alpha.powi(2) - 0.25) / (z * z)
    }

    pub fn eval_liouville_data(&self, t: f64, which: LiouvilleData) -> Result<f64> {
        match which {
            LiouvilleData::Q | LiouvilleData::Chi => {
                if !(t > 0.0 && t < FRAC_PI_2) {
                    return Err(Error::Domain(format!("t = {t} outside (0, π/2)")));
                }
            }
            LiouvilleData::G => {
                if !(t > 0.0) || !t.is_finite() {
                    return Err(Error::Domain(format!("t = {t} must be positive")));
                }
            }
        }
        Ok(match which {
            LiouvilleData::Q => self.q(t),
            LiouvilleData::Chi => self.chi(t),
            LiouvilleData::G => self.g(t),
        })
    }

    /// Θ = α² + β² − 1/2 + (2/π)∫_0^{π/2} χ.
    pub fn theta_constant(&self) -> Result<f64> {
        let base = self.alpha.powi(2) + self.beta.powi(2) - 0.5;
        if self.perturbation_roots.is_empty() {
            return Ok(base);
        }
        let (v, _) = quad::integrate_real(|t| self.chi(t), 0.0, FRAC_PI_2, 1e-12, 0.0)?;
        Ok(base + 2.0 / PI * v)
    }

    /// λ-independent constant relating the printed-potential eigenvalue ν to
    /// the squared spectral node: μ² = ν − nu_shift + ρ².
    pub fn node_from_nu(&self, nu: f64) -> f64 {
        nu - self.nu_shift + self.rho * self.rho
    }

    fn check_conditions(&self) -> Result<ConditionReport> {
        let mut min_a: f64 = f64::INFINITY;
        for i in 1..=400 {
            let t = 0.05 * i as f64;
            min_a = min_a.min(self.a_real(t).min(f64::MAX));
        }

        let mut min_b = f64::INFINITY;
        let mut even = 0.0f64;
        for i in 0..=60 {
            for j in 0..=20 {
                let z = Complex64::new(-6.0 + 0.2 * i as f64, -FRAC_PI_2 + FRAC_PI_2 * j as f64 / 10.0);
                let bz = self.b(z);
                min_b = min_b.min(bz.norm());
                if z.im.abs() < FRAC_PI_2 {
                    even = even.max((bz - self.b(-z)).norm() / bz.norm().max(1.0));
                }
            }
        }
        // positivity on the real line and on the imaginary segment
        for i in 0..=100 {
            let t = FRAC_PI_2 * i as f64 / 100.0;
            min_b = min_b.min(self.b(Complex64::new(0.0, t)).re);
            min_b = min_b.min(self.b(Complex64::new(0.2 * i as f64, 0.0)).re);
        }
        let mut half = 0.0f64;
        let ip2 = Complex64::new(0.0, FRAC_PI_2);
        for k in 0..20 {
            let w = Complex64::from_polar(0.3 * (k as f64 + 1.0) / 20.0, 0.3 * k as f64);
            let d = (self.b(ip2 + w) - self.b(ip2 - w)).norm();
            half = half.max(d / self.b(ip2 + w).norm().max(1.0));
        }

        // log-linear fit of |A'/A − 2ρ| on [5, 15]
        let pts: Vec<(f64, f64)> = (0..=20)
            .map(|i| 5.0 + 0.5 * i as f64)
            .map(|t| (t, (self.logderiv_a_real(t) - 2.0 * self.rho).abs()))
            .filter(|(_, r)| *r > 1e-15)
            .collect();
        let fitted_decay = if pts.len() >= 5 {
            let n = pts.len() as f64;
            let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (t, r)| (a + t, b + r.ln()));
            let (mx, my) = (sx / n, sy / n);
            let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (t, r)| {
                (a + (t - mx) * (r.ln() - my), b + (t - mx) * (t - mx))
            });
            Some(-num / den)
        } else {
            None
        };

        let gint = |panels: usize| -> f64 {
            let (xs, ws) = quad::composite_rule(0.0, 20.0, panels, 16, (true, false), 8);
            xs.iter().zip(&ws).map(|(t, w)| w * self.g(*t).abs()).sum()
        };
        let g1 = gint(80);
        let g2 = gint(160);
        let line = |s: f64| -> f64 {
            let (xs, ws) = quad::composite_rule(0.05, 20.0, 160, 16, (false, false), 0);
            xs.iter()
                .zip(&ws)
                .map(|(x, w)| w * self.g_complex(Complex64::new(*x, s)).norm())
                .sum()
        };
        Ok(ConditionReport {
            min_a_real: min_a,
            min_b_strip: min_b,
            evenness_error: even,
            evenness_half_period_error: half,
            fitted_decay,
            g_integral_real: g2,
            g_integral_refinement: (g2 - g1).abs(),
            g_integral_lines: [line(PI / 6.0), line(-PI / 6.0)],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unperturbed_rho() {
        let m = build_model(1.0, 1.0, &[], 16).unwrap();
        assert_eq!(m.rho, 3.0);
        assert!(m.report.all_ok(), "{:?}", m.report);
    }

    #[test]
    fn trivial_model_is_flat() {
        let m = build_model(-0.5, -0.5, &[], 16).unwrap();
        assert_eq!(m.rho, 0.0);
        for t in [0.3, 3.7] {
            let a = m.eval_coefficient(Complex64::new(t, 0.0), Coefficient::A).unwrap();
            assert!((a - 1.0).norm() < 1e-15);
        }
        assert!(build_model(-0.6, 0.0, &[], 16).is_err());
        assert!(build_model(0.0, 0.0, &[1.0], 16).is_err());
        assert!(build_model(0.0, 0.0, &[], 4).is_err());
    }

    #[test]
    fn perturbed_coefficients() {
        let m = build_model(1.0, 1.0, &[2.0], 16).unwrap();
        assert!((m.exp_coeffs[0] - 1.0).abs() < 1e-15);
        assert!((m.exp_coeffs[2] + 4.0).abs() < 1e-13);
        assert!(m.exp_coeffs.iter().skip(1).step_by(2).all(|b| *b == 0.0));
        assert!((m.rho - 4.0).abs() < 1e-15);
        // direct evaluation of B'/B against the truncated series
        for t in [5.0f64, 10.0] {
            let direct = m.h(Complex64::new(t, 0.0)).re;
            let s: f64 = m.exp_coeffs.iter().enumerate().map(|(j, b)| 2.0 * b * (-(j as f64) * t).exp()).sum();
            assert!((direct - s).abs() < 1e-12, "{direct} {s}");
        }
    }

    #[test]
    fn coefficient_examples() {
        let m = build_model(1.0, 1.0, &[2.0], 16).unwrap();
        let b0 = m.eval_coefficient(Complex64::new(0.0, 0.0), Coefficient::B).unwrap();
        assert!((b0 - 1.0).norm() < 1e-15);
        let a0 = m.eval_coefficient(Complex64::new(0.0, 0.0), Coefficient::A).unwrap();
        assert_eq!(a0, Complex64::new(0.0, 0.0));
        assert!(m.eval_coefficient(Complex64::new(0.0, 0.0), Coefficient::LogDerivA).is_err());
        assert!(m.eval_coefficient(Complex64::new(0.0, 1.6), Coefficient::B).is_err());
        // Ã(t) = (−i)^{2α+1} A(it)
        let t = 0.7;
        let ait = m.eval_coefficient(Complex64::new(0.0, t), Coefficient::A).unwrap();
        let at = m.eval_coefficient(Complex64::new(t, 0.0), Coefficient::ATilde).unwrap();
        assert!((Complex64::new(0.0, -1.0).powf(3.0) * ait - at).norm() < 1e-13);
    }

    #[test]
    fn logderiv_matches_finite_difference() {
        let m = build_model(0.3, 1.7, &[1.5, 4.0], 16).unwrap();
        let t = 0.8;
        let h = 1e-5;
        let fd = (m.a_real(t + h).ln() - m.a_real(t - h).ln()) / (2.0 * h);
        assert!((fd - m.logderiv_a_real(t)).abs() < 1e-8);
        let fd = (m.a_tilde(t + h).ln() - m.a_tilde(t - h).ln()) / (2.0 * h);
        assert!((fd - m.logderiv_a_tilde(t)).abs() < 1e-8);
    }

    #[test]
    fn theta_values() {
        assert_eq!(build_model(1.0, 1.0, &[], 16).unwrap().theta, 1.5);
        assert_eq!(build_model(0.5, 0.5, &[], 16).unwrap().theta, 0.0);
    }

    #[test]
    fn g_two_routes_agree() {
        for (a, b, roots) in [(1.0, 1.0, vec![]), (0.3, 0.8, vec![2.0, 3.0])] {
            let m = build_model(a, b, &roots, 16).unwrap();
            for t in [2.0, 0.5, 0.01] {
                let direct = m.g_complex(Complex64::new(t, 0.0)).re;
                assert!((m.g(t) - direct).abs() < 1e-10 * (1.0 + direct.abs()), "{t}: {} {}", m.g(t), direct);
            }
        }
    }

    #[test]
    fn q_vanishes_for_trivial_exponents() {
        let m = build_model(-0.5, -0.5, &[], 16).unwrap();
        assert!(m.q(0.7).abs() < 1e-12);
    }

    #[test]
    fn condition_report_perturbed() {
        let m = build_model(1.0, 1.0, &[2.0], 16).unwrap();
        assert!(m.report.all_ok(), "{:?}", m.report);
        assert!(m.report.fitted_decay.unwrap() > 1.9);
    }
}
