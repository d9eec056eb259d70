//! Scalar operator convex functions on (0, ∞) and their matrix versions.
//!
//! The catalog:
//!
//! | name | formula | parameter range |
//! |------|---------|-----------------|
//! | `gp:p` | `(x − xᵖ)/(1 − p)`, `x ln x` at `p = 1` | `p ∈ (0, 2]` |
//! | `hq:q` | `(1 − x^q)/q`, `−ln x` at `q = 0` | `q ∈ [−1, 1)` |
//! | `xlogx` | `x ln x` | |
//! | `neglog` | `−ln x` | |
//! | `tilde:<g>` | `x·g(1/x)` | |
//! | `power:p` | `xᵖ` (not normalized, `g(1) = 1`) | |
//! | `linear:b` | `b·(x − 1)` | |
//!
//! `power` and `linear` are not part of the class `g(1) = 0, g operator convex` in general;
//! they exist for calibration suites and sanity checks.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{apply_function, solve, ComplexMatrix, Domain, HermitianMatrix, ONE};

/// Below this distance from the limit point the closed forms `x ln x` and `−ln x` are used.
pub const PARAM_SWITCH: f64 = 1e-9;

/// `k(x)` switches to its Taylor expansion for `|x − 1| ≤ K_SEAM`.
pub const K_SEAM: f64 = 1e-4;

/// Nodes used by [`integral_log`] when the caller has no preference.
pub const DEFAULT_QUAD_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorConvexFunction {
    Gp(f64),
    Hq(f64),
    XLogX,
    NegLog,
    Tilde(Box<OperatorConvexFunction>),
    Power(f64),
    Linear(f64),
}

use OperatorConvexFunction as F;

fn check_gp(p: f64) -> Result<()> {
    if p > 0.0 && p <= 2.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "p",
            value: p,
            range: "(0, 2]",
        })
    }
}

fn check_hq(q: f64) -> Result<()> {
    if (-1.0..1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "q",
            value: q,
            range: "[-1, 1)",
        })
    }
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainViolation { value: x, floor: 0.0 })
    }
}

/// Generalized binomial coefficient `C(p, n)`.
fn binom(p: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (p - k as f64) / (k + 1) as f64)
}

/// Truncated power series in `h`, coefficients of `h⁰ … h⁵`.
type Series = [f64; 6];

fn series_mul(a: &Series, b: &Series) -> Series {
    let mut out = [0.0; 6];
    for i in 0..6 {
        for j in 0..(6 - i) {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// `Σ aₙ uⁿ` for a series `u` without constant term.
fn series_compose(a: &Series, u: &Series) -> Series {
    debug_assert_eq!(u[0], 0.0);
    let mut out = [0.0; 6];
    out[0] = a[5];
    for n in (0..5).rev() {
        out = series_mul(&out, u);
        out[0] += a[n];
    }
    out
}

/// `(1 + h)·g(1/(1 + h))` from the series of `g(1 + h)`.
fn series_tilde(a: &Series) -> Series {
    // 1/(1 + h) − 1 = −h + h² − h³ + h⁴ − h⁵
    let u = [0.0, -1.0, 1.0, -1.0, 1.0, -1.0];
    let inner = series_compose(a, &u);
    series_mul(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0], &inner)
}

impl OperatorConvexFunction {
    pub fn gp(p: f64) -> Result<Self> {
        check_gp(p)?;
        Ok(F::Gp(p))
    }

    pub fn hq(q: f64) -> Result<Self> {
        check_hq(q)?;
        Ok(F::Hq(q))
    }

    /// `x·g(1/x)`.
    pub fn tilde(self) -> Self {
        F::Tilde(Box::new(self))
    }

    /// Checks parameter ranges, recursively through transforms.
    pub fn validate(&self) -> Result<()> {
        match self {
            F::Gp(p) => check_gp(*p),
            F::Hq(q) => check_hq(*q),
            F::Tilde(inner) => inner.validate(),
            F::Power(p) if !p.is_finite() => Err(Error::ParameterOutOfRange {
                name: "power",
                value: *p,
                range: "finite reals",
            }),
            F::Linear(b) if !b.is_finite() => Err(Error::ParameterOutOfRange {
                name: "linear",
                value: *b,
                range: "finite reals",
            }),
            _ => Ok(()),
        }
    }

    /// Evaluates at `x > 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.validate()?;
        check_positive(x)?;
        Ok(self.value(x))
    }

    /// Evaluates without parameter or domain checks.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            F::Gp(p) => {
                let d = p - 1.0;
                if d.abs() < PARAM_SWITCH {
                    x * x.ln()
                } else {
                    x * (d * x.ln()).exp_m1() / d
                }
            }
            F::Hq(q) => {
                if q.abs() < PARAM_SWITCH {
                    -x.ln()
                } else {
                    -(q * x.ln()).exp_m1() / q
                }
            }
            F::XLogX => x * x.ln(),
            F::NegLog => -x.ln(),
            F::Tilde(inner) => x * inner.value(1.0 / x),
            F::Power(p) => x.powf(*p),
            F::Linear(b) => b * (x - 1.0),
        }
    }

    /// `g(1 + h)`, accurate to relative rounding for small `h`.
    pub fn value_at_offset(&self, h: f64) -> f64 {
        let l = h.ln_1p();
        match self {
            F::Gp(p) => {
                let d = p - 1.0;
                if d.abs() < PARAM_SWITCH {
                    (1.0 + h) * l
                } else {
                    (1.0 + h) * (d * l).exp_m1() / d
                }
            }
            F::Hq(q) => {
                if q.abs() < PARAM_SWITCH {
                    -l
                } else {
                    -(q * l).exp_m1() / q
                }
            }
            F::XLogX => (1.0 + h) * l,
            F::NegLog => -l,
            F::Tilde(inner) => (1.0 + h) * inner.value_at_offset(-h / (1.0 + h)),
            F::Power(p) => (p * l).exp(),
            F::Linear(b) => b * h,
        }
    }

    /// Taylor coefficients of `g(1 + h)` up to `h⁵`.
    pub fn taylor_at_one(&self) -> [f64; 6] {
        let mut a = [0.0; 6];
        match self {
            F::Gp(p) if (p - 1.0).abs() >= PARAM_SWITCH => {
                a[1] = 1.0;
                for (n, c) in a.iter_mut().enumerate().skip(2) {
                    *c = -binom(*p, n) / (1.0 - p);
                }
            }
            F::Gp(_) | F::XLogX => {
                a[1] = 1.0;
                for (n, c) in a.iter_mut().enumerate().skip(2) {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    *c = sign / (n * (n - 1)) as f64;
                }
            }
            F::Hq(q) if q.abs() >= PARAM_SWITCH => {
                for (n, c) in a.iter_mut().enumerate().skip(1) {
                    *c = -binom(*q, n) / q;
                }
            }
            F::Hq(_) | F::NegLog => {
                for (n, c) in a.iter_mut().enumerate().skip(1) {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    *c = sign / n as f64;
                }
            }
            F::Tilde(inner) => a = series_tilde(&inner.taylor_at_one()),
            F::Power(p) => {
                for (n, c) in a.iter_mut().enumerate() {
                    *c = binom(*p, n);
                }
            }
            F::Linear(b) => a[1] = *b,
        }
        a
    }

    /// Whether `g(1) = 0` holds by construction.
    pub fn vanishes_at_one(&self) -> bool {
        match self {
            F::Power(_) => false,
            F::Tilde(inner) => inner.vanishes_at_one(),
            _ => true,
        }
    }

    /// `g(h)` by spectral calculus; eigenvalues must exceed `floor`.
    pub fn apply(&self, h: &HermitianMatrix, floor: f64) -> Result<HermitianMatrix> {
        self.validate()?;
        let domain = match self {
            F::Linear(_) => Domain::Real,
            F::Power(p) if *p >= 1.0 && p.fract() == 0.0 => Domain::Real,
            _ => Domain::Positive,
        };
        apply_function(h, |x| self.value(x), domain, floor)
    }

    /// `k(h)` by spectral calculus.
    pub fn apply_k(&self, h: &HermitianMatrix, floor: f64) -> Result<HermitianMatrix> {
        if !self.vanishes_at_one() {
            return Err(not_normalized(self));
        }
        self.validate()?;
        apply_function(h, |x| k_value(self, x), Domain::Positive, floor)
    }
}

fn not_normalized(g: &OperatorConvexFunction) -> Error {
    Error::ParameterOutOfRange {
        name: "g(1)",
        value: g.value(1.0),
        range: "{0}",
    }
}

impl fmt::Display for OperatorConvexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            F::Gp(p) => write!(f, "gp:{p}"),
            F::Hq(q) => write!(f, "hq:{q}"),
            F::XLogX => write!(f, "xlogx"),
            F::NegLog => write!(f, "neglog"),
            F::Tilde(inner) => write!(f, "tilde:{inner}"),
            F::Power(p) => write!(f, "power:{p}"),
            F::Linear(b) => write!(f, "linear:{b}"),
        }
    }
}

impl FromStr for OperatorConvexFunction {
    type Err = Error;

    /// Parses names such as `gp:1.5`, `hq:-1`, `xlogx`, `neglog`, `tilde:xlogx`.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownFunction(s.to_string());
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let number = |r: Option<&str>| -> Result<f64> {
            r.and_then(|v| v.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(unknown)
        };
        let g = match head.to_ascii_lowercase().as_str() {
            "gp" => F::gp(number(rest)?)?,
            "hq" => F::hq(number(rest)?)?,
            "xlogx" if rest.is_none() => F::XLogX,
            "neglog" if rest.is_none() => F::NegLog,
            "tilde" => rest.ok_or_else(unknown)?.parse::<F>()?.tilde(),
            "power" => F::Power(number(rest)?),
            "linear" => F::Linear(number(rest)?),
            _ => return Err(unknown()),
        };
        Ok(g)
    }
}

/// `(x − xᵖ)/(1 − p)`, or `x ln x` at `p = 1`.
pub fn eval_gp(p: f64, x: f64) -> Result<f64> {
    F::gp(p)?.eval(x)
}

/// `(1 − x^q)/q`, or `−ln x` at `q = 0`.
pub fn eval_hq(q: f64, x: f64) -> Result<f64> {
    F::hq(q)?.eval(x)
}

/// `x·g(1/x)`.
pub fn eval_tilde(g: &OperatorConvexFunction, x: f64) -> Result<f64> {
    g.validate()?;
    check_positive(x)?;
    Ok(x * g.value(1.0 / x))
}

/// `k(x) = [g(x) + x·g(1/x)]/(x − 1)²`.
///
/// The singularity at `x = 1` is removable; within `K_SEAM` of it the numerator is replaced
/// by its Taylor expansion through `(x − 1)⁵`, giving four terms of `k`.
pub fn eval_k(g: &OperatorConvexFunction, x: f64) -> Result<f64> {
    g.validate()?;
    check_positive(x)?;
    if !g.vanishes_at_one() {
        return Err(not_normalized(g));
    }
    Ok(k_value(g, x))
}

fn k_value(g: &OperatorConvexFunction, x: f64) -> f64 {
    let h = x - 1.0;
    if h.abs() <= K_SEAM {
        k_taylor(g, h)
    } else {
        k_direct(g, x)
    }
}

pub(crate) fn k_taylor(g: &OperatorConvexFunction, h: f64) -> f64 {
    let a = g.taylor_at_one();
    let b = series_tilde(&a);
    let n: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    n[2] + h * (n[3] + h * (n[4] + h * n[5]))
}

pub(crate) fn k_direct(g: &OperatorConvexFunction, x: f64) -> f64 {
    let h = x - 1.0;
    let numerator = if h.abs() < 0.5 {
        g.value_at_offset(h) + x * g.value_at_offset(-h / x)
    } else {
        g.value(x) + x * g.value(1.0 / x)
    };
    numerator / (h * h)
}

/// `(P_n(x), P_{n−1}(x))` by the three-term recurrence, `n ≥ 1`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Gauss-Legendre nodes (ascending) and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let derivative = |x: f64| {
        let (pn, pn1) = legendre_pair(n, x);
        (pn, n as f64 * (x * pn - pn1) / (x * x - 1.0))
    };
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (pn, dp) = derivative(x);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = derivative(x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `log h` from `log x = ∫₀^∞ (1/(1+t) − 1/(x+t)) dt`.
///
/// With `t = s/(1 − s)` the integrand becomes `[(1 − s)h + sI]⁻¹ (h − I)` on `s ∈ (0, 1)`,
/// integrated with `quad_points` Gauss-Legendre nodes. Only linear solves are used, so the
/// result is independent of the eigensolver. Positivity is checked with a Cholesky factorization
/// of `h − floor·I`.
pub fn integral_log(h: &HermitianMatrix, quad_points: usize, floor: f64) -> Result<HermitianMatrix> {
    if quad_points == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "quad_points",
            value: 0.0,
            range: "positive integers",
        });
    }
    cholesky_check(h, floor)?;
    let n = h.dim();
    let eye = ComplexMatrix::identity(n);
    let h_minus_i = h.as_matrix() - &eye;
    let (nodes, weights) = gauss_legendre(quad_points);
    let mut acc = ComplexMatrix::zeros(n, n);
    for (x, w) in nodes.iter().zip(&weights) {
        let s = 0.5 * (x + 1.0);
        let shifted = &h.as_matrix().scale(1.0 - s) + &eye.scale(s);
        let term = solve(&shifted, &h_minus_i)?;
        acc = &acc + &term.scale(0.5 * w);
    }
    Ok(HermitianMatrix::symmetrize(acc))
}

/// Fails with `DomainViolation` unless `h − floor·I` is positive definite.
fn cholesky_check(h: &HermitianMatrix, floor: f64) -> Result<()> {
    let n = h.dim();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = h[(j, j)].re - floor;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 {
            return Err(Error::DomainViolation { value: d + floor, floor });
        }
        let djj = d.sqrt();
        l[(j, j)] = ONE * djj;
        for i in (j + 1)..n {
            let mut s = h[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(())
}
