//! Exact computation of the scalar parameters of the bubble-tower construction:
//! singularity exponents, concentration exponents, blow-up masses and the
//! physical parameters derived from them.
//!
//! All exponent arithmetic (alpha, s, r, q, beta_bar, masses over 4*pi) is done
//! in arbitrary-precision rationals. When gamma is given as a float it is first
//! converted to the exact rational value of that float, so the only rounding is
//! the one already present in the input. Quantities that involve transcendental
//! powers such as (tau*gamma)^(1/gamma) — the kappa, c and d coefficients — are
//! carried as natural logarithms in f64 to avoid under/overflow at extreme
//! concentration scales.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exact rational scalar used for all exponent arithmetic.
pub type Rational = BigRational;

/// Rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `p/q` display form, `p` when integral.
pub fn rat_str(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Lossy f64 view of a rational.
pub fn rat_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// The asymmetry parameter gamma in (0, 1], rational m/n (kept coprime) or real.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaRatio {
    Rational { m: u64, n: u64 },
    Real(f64),
}

impl GammaRatio {
    /// Rational gamma = m/n, reduced on construction.
    pub fn rational(m: u64, n: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter("gamma numerator and denominator must be positive".into()));
        }
        let g = m.gcd(&n);
        let (m, n) = (m / g, n / g);
        if m > n {
            return Err(Error::InvalidParameter(format!("gamma = {m}/{n} lies outside (0, 1]")));
        }
        Ok(GammaRatio::Rational { m, n })
    }

    /// Real gamma.
    pub fn real(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 || value > 1.0 {
            return Err(Error::InvalidParameter(format!("gamma = {value} lies outside (0, 1]")));
        }
        Ok(GammaRatio::Real(value))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, GammaRatio::Rational { .. })
    }

    /// Coprime pair (m, n) when gamma is rational.
    pub fn coprime_pair(&self) -> Option<(u64, u64)> {
        match self {
            GammaRatio::Rational { m, n } => Some((*m, *n)),
            GammaRatio::Real(_) => None,
        }
    }

    /// Exact rational value. A real gamma converts to the exact rational
    /// value of its f64 representation.
    pub fn exact(&self) -> Rational {
        match self {
            GammaRatio::Rational { m, n } => rat(*m as i64, *n as i64),
            GammaRatio::Real(x) => Rational::from_f64(*x).expect("finite gamma"),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            GammaRatio::Rational { m, n } => *m as f64 / *n as f64,
            GammaRatio::Real(x) => *x,
        }
    }
}

impl fmt::Display for GammaRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaRatio::Rational { m, n } => write!(f, "{m}/{n}"),
            GammaRatio::Real(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for GammaRatio {
    type Err = Error;

    /// Accepts `m/n` or a decimal literal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((m, n)) = s.split_once('/') {
            let m: u64 = m.trim().parse().map_err(|_| Error::ConfigParse(format!("bad gamma numerator in {s:?}")))?;
            let n: u64 = n.trim().parse().map_err(|_| Error::ConfigParse(format!("bad gamma denominator in {s:?}")))?;
            GammaRatio::rational(m, n).map_err(|e| Error::ConfigParse(e.to_string()))
        } else {
            let x: f64 = s.parse().map_err(|_| Error::ConfigParse(format!("bad gamma value {s:?}")))?;
            GammaRatio::real(x).map_err(|e| Error::ConfigParse(e.to_string()))
        }
    }
}

/// Arithmetic policy. Exponents are exact rationals in both modes; `Float`
/// only records that gamma itself entered as a float. Mantissas beyond f64
/// are rejected: every log-space quantity in the crate fits f64 comfortably.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Precision {
    Exact,
    Float { bits: u32 },
}

impl Precision {
    pub fn float(bits: u32) -> Result<Self> {
        if bits == 0 || bits > 53 {
            return Err(Error::InvalidParameter(format!(
                "float precision of {bits} mantissa bits unsupported (1..=53)"
            )));
        }
        Ok(Precision::Float { bits })
    }
}

/// Problem instance: k bubbles on the unit disk.
#[derive(Debug, Clone)]
pub struct TowerSpec {
    /// Number of bubbles, k >= 1.
    pub k: usize,
    pub gamma: GammaRatio,
    /// tau in (0, 1].
    pub tau: f64,
    /// h(0), the regular part of the Green's function at the origin.
    /// Zero on the unit disk.
    pub robin_at_origin: f64,
    pub precision: Precision,
}

impl TowerSpec {
    pub fn new(k: usize, gamma: GammaRatio, tau: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if !tau.is_finite() || tau <= 0.0 || tau > 1.0 {
            return Err(Error::InvalidParameter(format!("tau = {tau} lies outside (0, 1]")));
        }
        let precision = if gamma.is_rational() {
            Precision::Exact
        } else {
            Precision::Float { bits: 53 }
        };
        Ok(TowerSpec { k, gamma, tau, robin_at_origin: 0.0, precision })
    }

    pub fn with_robin(mut self, h0: f64) -> Self {
        self.robin_at_origin = h0;
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }
}

/// alpha_j from the closed form: 2[(1 + 1/gamma) j - 1/gamma] for odd j,
/// 2[(1 + gamma) j - 1] for even j. Always >= 2.
pub fn alpha_closed(j: usize, gamma: &Rational) -> Rational {
    assert!(j >= 1, "bubble index starts at 1");
    let two = rat_int(2);
    let one = Rational::one();
    let jr = rat_int(j as i64);
    if j % 2 == 1 {
        let inv = gamma.recip();
        two * ((&one + &inv) * jr - inv)
    } else {
        two * ((&one + gamma) * jr - one)
    }
}

/// The alpha sequence by the defining recursion: alpha_1 = 2, then
/// alpha_j = alpha_{j-1}/gamma + 2(1 + 1/gamma) for odd j and
/// alpha_j = gamma alpha_{j-1} + 2(1 + gamma) for even j.
pub fn alpha_recursive(k: usize, gamma: &Rational) -> Vec<Rational> {
    let mut out = Vec::with_capacity(k);
    let two = rat_int(2);
    for j in 1..=k {
        let a = if j == 1 {
            two.clone()
        } else {
            let prev: &Rational = &out[j - 2];
            if j % 2 == 1 {
                prev / gamma + &two * (Rational::one() + gamma.recip())
            } else {
                prev * gamma + &two * (Rational::one() + gamma)
            }
        };
        out.push(a);
    }
    out
}

/// The four elementary parity sums over 1..=k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParitySums {
    pub count_odd: u64,
    pub count_even: u64,
    pub sum_odd_j: u64,
    pub sum_even_j: u64,
}

/// Closed-form parity counts and index sums.
pub fn parity_sums(k: usize) -> ParitySums {
    assert!(k >= 1);
    let k = k as u64;
    if k % 2 == 1 {
        ParitySums {
            count_odd: (k + 1) / 2,
            count_even: (k - 1) / 2,
            sum_odd_j: (k + 1) * (k + 1) / 4,
            sum_even_j: (k - 1) * (k + 1) / 4,
        }
    } else {
        ParitySums {
            count_odd: k / 2,
            count_even: k / 2,
            sum_odd_j: k * k / 4,
            sum_even_j: k * (k + 2) / 4,
        }
    }
}

/// Closed-form parity sums of the alpha sequence and the signed total A_k.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSums {
    /// Sum of alpha_j over odd j <= k.
    pub sum_odd: Rational,
    /// (1/gamma) * sum of alpha_j over even j <= k.
    pub sum_even_over_gamma: Rational,
    /// A_k = sum of (-1)^i alpha_i / gamma^{sigma(i)}.
    pub a_k: Rational,
}

pub fn alpha_sums(k: usize, gamma: &Rational) -> AlphaSums {
    let one = Rational::one();
    let inv = gamma.recip();
    let kr = rat_int(k as i64);
    let coef = (&one + &inv) * &kr + &one - &inv; // (1+1/g)k + 1 - 1/g
    let (sum_odd, sum_even_over_gamma, a_k) = if k % 2 == 1 {
        let so = rat(k as i64 + 1, 2) * &coef;
        let se = rat(k as i64 - 1, 2) * &coef;
        (so, se, -coef)
    } else {
        let so = &kr * ((&one + &inv) * &kr / rat_int(2) - &inv);
        let se = &kr / rat_int(2) * ((&one + &inv) * (&kr + &one) + &one - &inv);
        let ak = (&one + &inv) * &kr;
        (so, se, ak)
    };
    AlphaSums { sum_odd, sum_even_over_gamma, a_k }
}

/// Outcome of the coprime normal form alpha_j/2 = (m+n) k_j +/- 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoprimeForm {
    /// alpha_j/2 is a natural number; sign is +1 for odd j, -1 for even j.
    Integer { k_j: u64, sign: i8 },
    /// alpha_j/2 is not an integer for this (j, gamma).
    NotInteger,
    /// gamma is irrational; the form does not apply.
    NotApplicable,
}

/// Normal form of alpha_j/2 modulo m+n for rational gamma = m/n.
pub fn coprime_form(j: usize, gamma: &GammaRatio) -> CoprimeForm {
    let Some((m, n)) = gamma.coprime_pair() else {
        return CoprimeForm::NotApplicable;
    };
    let half = alpha_closed(j, &gamma.exact()) / rat_int(2);
    if !half.is_integer() {
        return CoprimeForm::NotInteger;
    }
    let half = half.to_integer();
    let modulus = BigInt::from(m + n);
    let sign: i8 = if j % 2 == 1 { 1 } else { -1 };
    let k_j = (&half - BigInt::from(sign)) / &modulus;
    debug_assert_eq!(&k_j * &modulus + BigInt::from(sign), half);
    CoprimeForm::Integer { k_j: k_j.to_u64().expect("small k_j"), sign }
}

/// Indices h in [1, k/2] with alpha_{2h} < alpha_{2h-1}. Nonempty only for
/// gamma < 1; the exact characterization is h > 1/(1 - gamma^2).
pub fn monotonicity_violations(k: usize, gamma: &Rational) -> Vec<usize> {
    (1..=k / 2)
        .filter(|&h| alpha_closed(2 * h, gamma) < alpha_closed(2 * h - 1, gamma))
        .collect()
}

/// Per-bubble parameters. Exponents are exact; the rho-independent
/// coefficients kappa_j, c_j, d_j are stored as natural logs.
#[derive(Debug, Clone)]
pub struct BubbleEntry {
    pub alpha: Rational,
    /// delta_j = d_j rho^{s_j}.
    pub s: Rational,
    /// delta_j^{alpha_j} = c_j rho^{r_j}; r_j = alpha_j s_j exactly.
    pub r: Rational,
    /// delta_j / delta_{j+1} = (d_j/d_{j+1}) rho^{q_j}; None for j = k.
    pub q: Option<Rational>,
    pub kappa_log: f64,
    pub c_log: f64,
    pub d_log: f64,
}

/// All construction parameters for a (k, gamma, tau, h(0)) instance.
#[derive(Debug, Clone)]
pub struct BubbleFamily {
    pub k: usize,
    pub gamma: Rational,
    pub gamma_f64: f64,
    pub tau: f64,
    pub robin_at_origin: f64,
    /// entries[j-1] holds the parameters of bubble j.
    pub entries: Vec<BubbleEntry>,
    /// Signed exponent sum A_k.
    pub a_k: Rational,
    /// beta_bar = min over all r_i and q_i; every residual decays at
    /// least like rho^{beta_bar}.
    pub beta_bar: Rational,
}

impl BubbleFamily {
    /// ln delta_j at a given rho (1-based j).
    pub fn delta_log(&self, j: usize, rho: f64) -> f64 {
        let e = &self.entries[j - 1];
        e.d_log + rat_f64(&e.s) * rho.ln()
    }

    /// ln delta_j^{alpha_j} at a given rho.
    pub fn delta_alpha_log(&self, j: usize, rho: f64) -> f64 {
        let e = &self.entries[j - 1];
        e.c_log + rat_f64(&e.r) * rho.ln()
    }

    pub fn beta_bar_f64(&self) -> f64 {
        rat_f64(&self.beta_bar)
    }
}

fn s_exponent(k: usize, j: usize, gamma: &Rational) -> Rational {
    let one = Rational::one();
    let gp1 = gamma + &one;
    let kmj = rat_int((k - j) as i64);
    let num = if k % 2 == 1 { &gp1 * kmj + gamma } else { &gp1 * kmj + &one };
    let den = rat_int(2) * (&gp1 * rat_int(j as i64) - &one);
    num / den
}

fn r_exponent(k: usize, j: usize, gamma: &Rational) -> Rational {
    let one = Rational::one();
    let inv = gamma.recip();
    let kmj = rat_int((k - j) as i64);
    match (k % 2 == 1, j % 2 == 1) {
        (true, false) => (gamma + &one) * kmj + gamma,
        (true, true) => (&one + &inv) * kmj + &one,
        (false, true) => (&one + &inv) * kmj + &inv,
        (false, false) => (&one + gamma) * kmj + &one,
    }
}

fn q_exponent(k: usize, j: usize, gamma: &Rational) -> Rational {
    let one = Rational::one();
    let gp1 = gamma + &one;
    let jr = rat_int(j as i64);
    let den = rat_int(2) * (&gp1 * &jr + gamma) * (&gp1 * &jr - &one);
    let num = if k % 2 == 1 {
        &gp1 * (&gp1 * rat_int(k as i64) + gamma - &one)
    } else {
        &gp1 * &gp1 * rat_int(k as i64)
    };
    num / den
}

fn kappa_log(k: usize, j: usize, alphas: &[f64], gamma: f64, tau: f64, h0: f64, a_k: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let aj = alphas[j - 1];
    if j == k {
        if k % 2 == 1 {
            -4.0 * PI * h0 * a_k - ln2 - 2.0 * aj.ln()
        } else {
            (tau * gamma).ln() + 4.0 * PI * h0 * a_k - ln2 - 2.0 * aj.ln()
        }
    } else {
        let anext = alphas[j];
        if j % 2 == 1 {
            (tau * gamma).ln() / gamma - (1.0 + 1.0 / gamma) * ln2 - 2.0 * aj.ln() - (2.0 / gamma) * anext.ln()
        } else {
            (tau * gamma).ln() - (1.0 + gamma) * ln2 - 2.0 * aj.ln() - 2.0 * gamma * anext.ln()
        }
    }
}

/// Fill a `BubbleFamily`: exact exponents from the parity-split closed forms,
/// log-space kappa/c/d coefficients from the alternating kappa products.
pub fn concentration_params(spec: &TowerSpec) -> BubbleFamily {
    let k = spec.k;
    let gamma = spec.gamma.exact();
    let gamma_f = spec.gamma.to_f64();
    let sums = alpha_sums(k, &gamma);
    let a_k_f = rat_f64(&sums.a_k);

    let alphas: Vec<Rational> = (1..=k).map(|j| alpha_closed(j, &gamma)).collect();
    let alphas_f: Vec<f64> = alphas.iter().map(rat_f64).collect();
    let kappa_logs: Vec<f64> = (1..=k)
        .map(|j| kappa_log(k, j, &alphas_f, gamma_f, spec.tau, spec.robin_at_origin, a_k_f))
        .collect();

    // c_j = prod_{i=j..k} kappa_i^{e_i}: e_i = 1 at the parity of j, and
    // 1/gamma (j odd) or gamma (j even) at the opposite parity.
    let c_logs: Vec<f64> = (1..=k)
        .map(|j| {
            let cross = if j % 2 == 1 { 1.0 / gamma_f } else { gamma_f };
            (j..=k)
                .map(|i| {
                    let e = if i % 2 == j % 2 { 1.0 } else { cross };
                    e * kappa_logs[i - 1]
                })
                .sum()
        })
        .collect();

    let mut entries = Vec::with_capacity(k);
    for j in 1..=k {
        let alpha = alphas[j - 1].clone();
        let s = s_exponent(k, j, &gamma);
        let r = r_exponent(k, j, &gamma);
        debug_assert_eq!(r, &alpha * &s, "r_j = alpha_j s_j must hold exactly");
        let q = (j < k).then(|| q_exponent(k, j, &gamma));
        let c_log = c_logs[j - 1];
        entries.push(BubbleEntry {
            d_log: c_log / alphas_f[j - 1],
            alpha,
            s,
            r,
            q,
            kappa_log: kappa_logs[j - 1],
            c_log,
        });
    }

    let beta_bar = entries
        .iter()
        .flat_map(|e| std::iter::once(e.r.clone()).chain(e.q.clone()))
        .min()
        .expect("k >= 1");

    BubbleFamily {
        k,
        gamma,
        gamma_f64: gamma_f,
        tau: spec.tau,
        robin_at_origin: spec.robin_at_origin,
        entries,
        a_k: sums.a_k,
        beta_bar,
    }
}

/// Evaluate ln delta_j^{alpha_j} both by the closed form c_j rho^{r_j} and by
/// the defining recursion, and return the largest log-space discrepancy.
pub fn delta_recursive_check(family: &BubbleFamily, rho: f64) -> f64 {
    let k = family.k;
    let g = family.gamma_f64;
    let ln_rho = rho.ln();
    let mut rec = vec![0.0; k];
    rec[k - 1] = family.entries[k - 1].kappa_log + ln_rho;
    for j in (1..k).rev() {
        let e = &family.entries[j - 1];
        rec[j - 1] = if j % 2 == 1 {
            e.kappa_log + (1.0 + 1.0 / g) * ln_rho + rec[j] / g
        } else {
            e.kappa_log + (1.0 + g) * ln_rho + g * rec[j]
        };
    }
    (1..=k)
        .map(|j| (rec[j - 1] - family.delta_alpha_log(j, rho)).abs())
        .fold(0.0, f64::max)
}

/// Blow-up masses and the mass identity, all exact over 4*pi.
#[derive(Debug, Clone)]
pub struct MassReport {
    /// m_+(0) / 4 pi.
    pub m_plus_norm: Rational,
    /// m_-(0) / 4 pi.
    pub m_minus_norm: Rational,
    /// M_k / 4 pi = (m_+ - m_-) / 4 pi.
    pub m_k_norm: Rational,
    /// lambda / 2 pi.
    pub lambda_norm: Rational,
    /// p_bar in [0, 1].
    pub p_bar: Rational,
    /// 8 pi (m_+ + m_-/gamma) - (m_+ - m_-)^2, exactly zero for every (k, gamma).
    pub identity_residual_norm: Rational,
}

impl MassReport {
    pub fn m_plus(&self) -> f64 {
        4.0 * PI * rat_f64(&self.m_plus_norm)
    }
    pub fn m_minus(&self) -> f64 {
        4.0 * PI * rat_f64(&self.m_minus_norm)
    }
    pub fn m_k(&self) -> f64 {
        4.0 * PI * rat_f64(&self.m_k_norm)
    }
    pub fn lambda(&self) -> f64 {
        2.0 * PI * rat_f64(&self.lambda_norm)
    }
    pub fn p_bar_f64(&self) -> f64 {
        rat_f64(&self.p_bar)
    }
    /// Identity residual in absolute units (multiplied back by (4 pi)^2).
    pub fn identity_residual(&self) -> f64 {
        16.0 * PI * PI * rat_f64(&self.identity_residual_norm)
    }
}

/// Blow-up masses from the parity formulas, cross-checked against the
/// alpha parity sums.
pub fn blowup_masses(spec: &TowerSpec) -> MassReport {
    let k = spec.k;
    let gamma = spec.gamma.exact();
    let one = Rational::one();
    let inv = gamma.recip();
    let kr = rat_int(k as i64);

    let (m_plus, m_minus) = if k % 2 == 1 {
        let coef = (&one + &inv) * &kr + &one - &inv;
        (rat(k as i64 + 1, 2) * &coef, rat(k as i64 - 1, 2) * &coef)
    } else {
        let half = (&one + &inv) * &kr / rat_int(2);
        (&kr * (&half - &inv), &kr * (&half + &one))
    };

    // The theorem's masses are exactly the alpha parity sums.
    let sums = alpha_sums(k, &gamma);
    debug_assert_eq!(m_plus, sums.sum_odd);
    debug_assert_eq!(m_minus, sums.sum_even_over_gamma);

    let m_k = &m_plus - &m_minus;
    let lambda_over_4pi = &m_plus + &m_minus / &gamma;
    // 8 pi (m_+ + m_-/gamma) - M_k^2 over (4 pi)^2.
    let identity_residual_norm = rat_int(2) * &lambda_over_4pi - &m_k * &m_k;
    let p_bar = &m_plus / &lambda_over_4pi;

    MassReport {
        m_plus_norm: m_plus,
        m_minus_norm: m_minus,
        m_k_norm: m_k,
        lambda_norm: rat_int(2) * lambda_over_4pi,
        p_bar,
        identity_residual_norm,
    }
}

/// 8 pi (m_+ + m_-/gamma) - (m_+ - m_-)^2 recomputed from a report.
pub fn mass_identity_residual(report: &MassReport, gamma: &GammaRatio) -> f64 {
    let g = gamma.exact();
    let norm = rat_int(2) * (&report.m_plus_norm + &report.m_minus_norm / g)
        - (&report.m_plus_norm - &report.m_minus_norm) * (&report.m_plus_norm - &report.m_minus_norm);
    16.0 * PI * PI * rat_f64(&norm)
}

/// Total vortex mass lambda and distribution parameter p_bar, each computed
/// along every route the closed forms admit.
#[derive(Debug, Clone)]
pub struct PhysicsParams {
    /// lambda / 2 pi.
    pub lambda_norm: Rational,
    pub p_bar: Rational,
    /// The three lambda routes agreed exactly.
    pub lambda_routes_agree: bool,
    /// The two p_bar routes agreed exactly.
    pub p_bar_routes_agree: bool,
}

impl PhysicsParams {
    pub fn lambda(&self) -> f64 {
        2.0 * PI * rat_f64(&self.lambda_norm)
    }
    pub fn p_bar_f64(&self) -> f64 {
        rat_f64(&self.p_bar)
    }
}

/// lambda = m_+ + m_-/gamma = M_k^2 / 8 pi = parity closed form, and
/// p_bar = m_+/lambda = parity closed form.
pub fn physics_params(spec: &TowerSpec) -> PhysicsParams {
    let k = spec.k;
    let gamma = spec.gamma.exact();
    let one = Rational::one();
    let inv = gamma.recip();
    let kr = rat_int(k as i64);
    let masses = blowup_masses(spec);

    // Route 1: lambda/2pi = 2(m_+ + m_-/gamma)/4pi-normalized.
    let route1 = masses.lambda_norm.clone();
    // Route 2: lambda/2pi = (M_k/4pi)^2.
    let route2 = &masses.m_k_norm * &masses.m_k_norm;
    // Route 3: parity closed form.
    let route3 = if k % 2 == 1 {
        let coef = (&one + &inv) * &kr + &one - &inv;
        &coef * &coef
    } else {
        (&one + &inv) * (&one + &inv) * &kr * &kr
    };
    let lambda_routes_agree = route1 == route2 && route2 == route3;

    let p_direct = masses.p_bar.clone();
    let p_closed = if k % 2 == 1 {
        (&kr + &one) / ((&one + &inv) * &kr + &one - &inv)
    } else {
        ((&one + &inv) * &kr - rat_int(2) * &inv) / ((&one + &inv) * (&one + &inv) * &kr)
    };
    let p_bar_routes_agree = p_direct == p_closed;

    PhysicsParams {
        lambda_norm: route1,
        p_bar: p_direct,
        lambda_routes_agree,
        p_bar_routes_agree,
    }
}

/// Enumerate the coprime pairs (m, n) with m <= n <= bound, gamma = m/n in (0, 1].
pub fn coprime_gammas(bound: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for n in 1..=bound {
        for m in 1..=n {
            if m.gcd(&n) == 1 {
                out.push((m, n));
            }
        }
    }
    out
}
