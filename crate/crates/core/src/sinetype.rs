//! The sine-type function `S(z) = πz ∏ (1 + z²/μ_n²)` built from the spectral
//! nodes, `S_1 = z²/S`, its residues at `iμ_n`, and `b = c(λ) c(−λ) S_1(λ)`.
//!
//! Zeros past the computed ones follow `μ_j = √((σ j + o)² + k1)`; the product
//! over `j ≥ N` of such factors is a ratio of gamma functions, so the infinite
//! product is evaluated exactly for that zero set.

use crate::cfunc::{self, CMethod};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::special::ln_gamma;
use crate::spectrum::EigenData;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

pub const DEFAULT_TRUNCATION: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Generic,
    ZeroAtOrigin,
}

/// Asymptotic law μ_j² ≈ (σ j + o)² + k1 for the j-th nonzero zero.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailLaw {
    pub sigma: f64,
    pub offset: f64,
    pub k1: f64,
}

impl TailLaw {
    pub fn node(&self, j: usize) -> f64 {
        let m = self.sigma * j as f64 + self.offset;
        (m * m + self.k1).sqrt()
    }

    /// ln ∏_{j ≥ n} (1 + z²/μ_j²)
    fn ln_tail(&self, z: Complex64, n: usize) -> Complex64 {
        let x = self.offset / self.sigma + n as f64;
        let s2 = self.sigma * self.sigma;
        // ∏ ((j+x)² + w²)/((j+x)² + v²), w² = (z² + k1)/σ², v² = k1/σ²
        let w2 = (z * z + self.k1) / s2;
        let v2 = Complex64::new(self.k1 / s2, 0.0);
        if x > 4.0 * w2.norm().max(v2.norm()).sqrt() + 20.0 {
            return gamma_ratio_asymptotic(x, v2, w2);
        }
        let (w, v) = (w2.sqrt(), v2.sqrt());
        let i = Complex64::i();
        let za = Complex64::new(x, 0.0);
        ln_gamma(za + i * v) + ln_gamma(za - i * v) - ln_gamma(za + i * w) - ln_gamma(za - i * w)
    }
}

fn bernoulli_numbers(n: usize) -> Vec<f64> {
    // B_m = −1/(m+1) Σ_{k<m} C(m+1, k) B_k, with B_1 = −1/2
    let mut b = vec![1.0];
    for m in 1..=n {
        let mut s = 0.0;
        let mut c = 1.0;
        for (k, bk) in b.iter().enumerate() {
            s += c * bk;
            c *= (m + 1 - k) as f64 / (k + 1) as f64;
        }
        b.push(-s / (m + 1) as f64);
    }
    b
}

/// B_m(iu) + B_m(−iu) as a polynomial in u².
fn bernoulli_pair(m: usize, bern: &[f64], u2: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pw = Complex64::new(1.0, 0.0);
    // terms (iu)^{2p} = (−u²)^p with j = m − 2p
    let mut p = 0;
    while 2 * p <= m {
        let j = m - 2 * p;
        let binom = (0..j).fold(1.0, |acc, k| acc * (m - k) as f64 / (k + 1) as f64);
        sum += binom * bern[j] * pw;
        pw *= -u2;
        p += 1;
    }
    2.0 * sum
}

/// lnΓ(x+iv)Γ(x−iv)/(Γ(x+iw)Γ(x−iw)) for large x from the 1/x expansion of
/// lnΓ(x+u); the leading (x+u−½)ln x − x parts cancel between the four terms.
fn gamma_ratio_asymptotic(x: f64, v2: Complex64, w2: Complex64) -> Complex64 {
    const TERMS: usize = 40;
    static BERN: OnceLock<Vec<f64>> = OnceLock::new();
    let bern = BERN.get_or_init(|| bernoulli_numbers(TERMS + 1));
    let mut total = Complex64::new(0.0, 0.0);
    let mut xk = x;
    for k in 1..=TERMS {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * (bernoulli_pair(k + 1, bern, v2) - bernoulli_pair(k + 1, bern, w2)) / ((k * (k + 1)) as f64 * xk);
        total += term;
        if term.norm() <= 1e-18 * total.norm() {
            break;
        }
        xk *= x;
    }
    total
}

#[derive(Debug, Clone, Serialize)]
pub struct SineTypeData {
    /// nonzero zeros μ_j in increasing order, first the computed ones
    pub mus: Vec<f64>,
    /// how many leading entries of `mus` come from the spectrum
    pub computed: usize,
    /// spectral index of `mus[0]`
    pub first_index: usize,
    pub branch: Branch,
    pub residues: Vec<Complex64>,
    pub truncation_n: usize,
    pub tail: TailLaw,
}

impl SineTypeData {
    /// Zero set from computed nodes plus the tail law.
    pub fn new(computed: &[f64], first_index: usize, branch: Branch, tail: TailLaw, truncation_n: usize) -> Result<Self> {
        let n = truncation_n.max(computed.len());
        let mut mus: Vec<f64> = computed.to_vec();
        for j in computed.len()..n {
            mus.push(tail.node(j));
        }
        if mus.windows(2).any(|w| !(w[1] > w[0])) || mus.first().map_or(false, |m| !(*m > 0.0)) {
            return Err(Error::InvalidParameter("zeros must be positive and increasing".into()));
        }
        let mut data = SineTypeData {
            mus,
            computed: computed.len(),
            first_index: first_index,
            branch,
            residues: Vec::new(),
            truncation_n: n,
            tail,
        };
        let mut res = Vec::with_capacity(data.computed);
        for j in 0..data.computed {
            res.push(data.residue_product(j));
        }
        data.residues = res;
        Ok(data)
    }

    /// ln of ∏_j (1 + z²/μ_j²) with the factor `skip` left out.
    fn ln_product(&self, z: Complex64, skip: Option<usize>) -> Complex64 {
        let z2 = z * z;
        let mut prod = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &m) in self.mus.iter().enumerate() {
            if Some(j) == skip {
                continue;
            }
            prod *= (m * m + z2) / (m * m);
            if j % 32 == 31 {
                acc += prod.ln();
                prod = Complex64::new(1.0, 0.0);
            }
        }
        acc + prod.ln() + self.tail.ln_tail(z, self.mus.len())
    }

    fn prefactor(&self, z: Complex64) -> Complex64 {
        match self.branch {
            Branch::Generic => PI * z,
            Branch::ZeroAtOrigin => PI * z * z * z,
        }
    }

    pub fn sine_s(&self, z: Complex64) -> Complex64 {
        self.prefactor(z) * self.ln_product(z, None).exp()
    }

    /// S_1(z) = z²/S(z).
    pub fn s1(&self, z: Complex64) -> Complex64 {
        let lp = self.ln_product(z, None);
        match self.branch {
            Branch::Generic => z / PI * (-lp).exp(),
            Branch::ZeroAtOrigin => (-lp).exp() / (PI * z),
        }
    }

    /// Position of spectral index `n` in `mus`.
    pub fn slot(&self, n: usize) -> Result<usize> {
        let j = n.checked_sub(self.first_index).ok_or_else(|| Error::Domain(format!("index {n} below n0")))?;
        if j >= self.computed {
            return Err(Error::Domain(format!("index {n} beyond the computed zeros")));
        }
        Ok(j)
    }

    /// Residue from the product with the vanishing factor removed.
    fn residue_product(&self, j: usize) -> Complex64 {
        let mu = self.mus[j];
        let z = Complex64::new(0.0, mu);
        let r = self.ln_product(z, Some(j)).exp();
        match self.branch {
            // S'(iμ) = −2πR
            Branch::Generic => mu * mu / (2.0 * PI * r),
            // S'(iμ) = 2πμ²R
            Branch::ZeroAtOrigin => -1.0 / (2.0 * PI * r),
        }
    }

    /// M(x) = S(ix)/(πx) (or S(ix)/x³), via the product.
    fn m_fn(&self, x: Complex64) -> Complex64 {
        let z = Complex64::i() * x;
        match self.branch {
            Branch::Generic => self.sine_s(z) / (PI * x),
            Branch::ZeroAtOrigin => self.sine_s(z) / (x * x * x),
        }
    }

    /// Residue by the derivative of M, independent of the product formula.
    fn residue_derivative(&self, j: usize) -> Complex64 {
        let mu = self.mus[j];
        let h = 1e-6 * (1.0 + mu);
        let x = Complex64::new(mu, 0.0);
        let f = |d: f64| self.m_fn(x + d);
        let dm = (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
        match self.branch {
            Branch::Generic => mu * mu / (Complex64::i() * PI * mu * dm),
            Branch::ZeroAtOrigin => 1.0 / (Complex64::i() * mu * dm),
        }
    }
}

/// Zero set and residues from the computed spectrum.
pub fn build_sinetype(model: &Model, eigen: &EigenData, truncation_n: usize) -> Result<SineTypeData> {
    let sq = eigen.node_squares(model.rho);
    let n0 = eigen.n0.max(0) as usize;
    let branch = if n0 < sq.len() && sq[n0].abs() < 1e-9 * (1.0 + model.rho * model.rho) {
        Branch::ZeroAtOrigin
    } else {
        Branch::Generic
    };
    let start = if branch == Branch::ZeroAtOrigin { n0 + 1 } else { n0 };
    let computed: Vec<f64> = sq[start.min(sq.len())..].iter().map(|v| v.sqrt()).collect();
    let k1 = model.rho * model.rho - model.nu_shift - model.theta;
    let tail = TailLaw {
        sigma: 2.0,
        offset: model.rho0 + 2.0 * start as f64,
        k1,
    };
    SineTypeData::new(&computed, start, branch, tail, truncation_n)
}

pub fn sine_s(data: &SineTypeData, z: Complex64) -> Complex64 {
    data.sine_s(z)
}

/// d_n, cross-checked between the product and derivative formulas.
pub fn residue_d(data: &SineTypeData, n: usize) -> Result<Complex64> {
    let j = data.slot(n)?;
    let a = data.residues[j];
    let b = data.residue_derivative(j);
    let d = (a - b).norm() / a.norm();
    if d > 1e-7 {
        return Err(Error::CrossCheck {
            what: format!("residue d_{n}"),
            discrepancy: d,
            tolerance: 1e-7,
        });
    }
    Ok(a)
}

/// Both residue formulas, for reporting.
pub fn residue_pair(data: &SineTypeData, n: usize) -> Result<(Complex64, Complex64)> {
    let j = data.slot(n)?;
    Ok((data.residues[j], data.residue_derivative(j)))
}

/// b(λ) = c(λ) c(−λ) S_1(λ).
pub fn b_eval(model: &Model, data: &SineTypeData, lambda: Complex64) -> Result<Complex64> {
    if lambda.norm() < 1e-12 {
        return Err(Error::Pole("b has a pole at λ = 0".into()));
    }
    for m in &data.mus[..data.computed] {
        if (lambda.re.abs() < 1e-9) && (lambda.im.abs() - m).abs() < 1e-9 {
            return Err(Error::Pole(format!("λ = {lambda} is a pole of S_1")));
        }
    }
    let cp = cfunc::eval_c(model, lambda, CMethod::Wronskian)?.value;
    let cm = cfunc::eval_c(model, -lambda, CMethod::Wronskian)?.value;
    Ok(cp * cm * data.s1(lambda))
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeStats {
    /// max and min of |S_1| e^{π|x|/2} / (1 + |z|²)
    pub ratio_max: f64,
    pub ratio_min: f64,
    /// exponent d from a log fit of |S_1(x)| e^{π|x|/2} against ln |x|
    pub fitted_exponent: f64,
    /// max and min of |S_1| e^{π|x|/2} / (1 + |z|)^d with the fitted d
    pub fitted_max: f64,
    pub fitted_min: f64,
}

/// Decay envelope of S_1 on |x| ≤ x_max, |y| ≤ y_max, away from poles.
pub fn s1_envelope(data: &SineTypeData, x_max: f64, y_max: f64) -> EnvelopeStats {
    let pts: Vec<(f64, f64)> = (1..=40)
        .map(|k| x_max * k as f64 / 40.0)
        .filter(|x| *x >= 5.0)
        .map(|x| (x.ln(), (data.s1(Complex64::new(x, 0.0)).norm() * (PI * x / 2.0).exp()).ln()))
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (num, den) = pts
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + (p.0 - sx / n) * (p.1 - sy / n), a.1 + (p.0 - sx / n).powi(2)));
    let d = num / den;
    let mut st = EnvelopeStats {
        ratio_max: 0.0,
        ratio_min: f64::INFINITY,
        fitted_exponent: d,
        fitted_max: 0.0,
        fitted_min: f64::INFINITY,
    };
    for i in 0..=120 {
        for k in 0..=12 {
            let z = Complex64::new(-x_max + 2.0 * x_max * i as f64 / 120.0, -y_max + 2.0 * y_max * k as f64 / 12.0);
            if z.norm() < 0.5 || data.mus.iter().any(|m| (z - Complex64::new(0.0, *m)).norm() < 0.5 || (z + Complex64::new(0.0, *m)).norm() < 0.5) {
                continue;
            }
            let base = data.s1(z).norm() * (PI * z.re.abs() / 2.0).exp();
            let r = base / (1.0 + z.norm_sqr());
            let f = base / (1.0 + z.norm()).powf(d);
            st.ratio_max = st.ratio_max.max(r);
            st.ratio_min = st.ratio_min.min(r);
            st.fitted_max = st.fitted_max.max(f);
            st.fitted_min = st.fitted_min.min(f);
        }
    }
    st
}
