//! Deficit computations and the sampling engine behind every suite.
//!
//! A deficit is a number whose nonnegativity certifies an inequality: `t·F(P₁) + (1−t)·F(P₂) −
//! F(tP₁ + (1−t)P₂)` for convexity claims, the smallest eigenvalue of the corresponding
//! difference for operator claims, or an entropy gap. Sample `i` of a run draws all its
//! randomness from `derive_rng(config.master_seed, i)`, so samples run in parallel and the
//! reduction (minimum deficit, smallest index on ties) does not depend on scheduling.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{relative_entropy, von_neumann_entropy, DensityMatrix, MultipartiteState};
use crate::error::{Error, Result};
use crate::functions::OperatorConvexFunction;
use crate::linalg::{
    kron, matrix_log, matrix_power, min_eigenvalue, partial_trace, solve, ComplexMatrix,
    HermitianMatrix, C64, DEFAULT_FLOOR,
};
use crate::sampling::{derive_rng, random_pd, Rng, SampleConfig, PD_SPECTRUM};

/// Outcome of one suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub suite_name: String,
    pub config: SampleConfig,
    pub worst_deficit: f64,
    pub worst_sample_index: usize,
    pub pass: bool,
    pub epsilon_mix: f64,
    pub notes: String,
}

impl ConvexityReport {
    fn new(
        suite_name: &str,
        config: &SampleConfig,
        epsilon_mix: f64,
        worst_deficit: f64,
        worst_sample_index: usize,
        notes: String,
    ) -> Self {
        Self {
            suite_name: suite_name.to_string(),
            config: config.clone(),
            worst_deficit,
            worst_sample_index,
            pass: worst_deficit >= -config.tol,
            epsilon_mix,
            notes,
        }
    }

    /// Merges runs of the same suite over a parameter grid, keeping the worst one.
    ///
    /// Ties go to the earliest part. Parts must share the configuration of the merged report.
    pub fn worst_of(
        suite_name: &str,
        config: &SampleConfig,
        parts: Vec<(String, ConvexityReport)>,
    ) -> Self {
        let labels: Vec<&str> = parts.iter().map(|(l, _)| l.as_str()).collect();
        let labels = labels.join(", ");
        let mut worst: Option<&(String, ConvexityReport)> = None;
        for part in &parts {
            worst = match worst {
                None => Some(part),
                Some(w) if is_worse(part.1.worst_deficit, w.1.worst_deficit) => Some(part),
                keep => keep,
            };
        }
        match worst {
            None => Self::new(suite_name, config, 0.0, 0.0, 0, "empty parameter grid".into()),
            Some((label, r)) => {
                let mut out = Self::new(
                    suite_name,
                    config,
                    r.epsilon_mix,
                    r.worst_deficit,
                    r.worst_sample_index,
                    format!("grid [{labels}]; worst {label}: {}", r.notes),
                );
                out.pass = parts.iter().all(|(_, p)| p.pass);
                out
            }
        }
    }
}

fn is_worse(candidate: f64, current: f64) -> bool {
    if current.is_nan() {
        return false;
    }
    candidate.is_nan() || candidate < current
}

/// Whether a suite tests `F(mix) ≤ mix of F` or the reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Convex,
    Concave,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Convex => 1.0,
            Direction::Concave => -1.0,
        }
    }
}

/// Runs `sample(i, rng)` for every sample index and reduces to the worst deficit.
///
/// `sample` returns the deficit of sample `i` and a short description of where it occurred. The
/// first failing sample (lowest index) turns the report into a failure with `−∞` deficit.
pub fn run_sampled<F>(
    suite_name: &str,
    config: &SampleConfig,
    epsilon_mix: f64,
    claim: &str,
    sample: F,
) -> Result<ConvexityReport>
where
    F: Fn(usize, &mut Rng) -> Result<(f64, String)> + Sync,
{
    config.validate()?;
    let outcomes: Vec<Result<(f64, String)>> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(config.master_seed, i as u64);
            sample(i, &mut rng)
        })
        .collect();

    let mut worst: Option<(usize, f64, &str)> = None;
    for (i, outcome) in outcomes.iter().enumerate() {
        match outcome {
            Err(e) => {
                return Ok(ConvexityReport::new(
                    suite_name,
                    config,
                    epsilon_mix,
                    f64::NEG_INFINITY,
                    i,
                    format!("{claim}; sample {i} failed: {e}"),
                ));
            }
            Ok((d, detail)) => {
                if worst.is_none_or(|(_, w, _)| is_worse(*d, w)) {
                    worst = Some((i, *d, detail));
                }
            }
        }
    }
    let (i, d, detail) = worst.expect("validated configs have at least one sample");
    let detail = if detail.is_empty() { String::new() } else { format!(" ({detail})") };
    Ok(ConvexityReport::new(
        suite_name,
        config,
        epsilon_mix,
        d,
        i,
        format!("{claim}; worst at sample {i}{detail}"),
    ))
}

/// Points that can be convexly combined.
pub trait Mixable: Sized {
    /// `t·self + (1−t)·other`.
    fn mix(&self, other: &Self, t: f64) -> Self;

    /// Size used to scale the deficit tolerance.
    fn size(&self) -> f64;
}

impl Mixable for HermitianMatrix {
    fn mix(&self, other: &Self, t: f64) -> Self {
        HermitianMatrix::mix(self, other, t)
    }

    fn size(&self) -> f64 {
        self.norm_inf()
    }
}

impl Mixable for ComplexMatrix {
    fn mix(&self, other: &Self, t: f64) -> Self {
        &self.scale(t) + &other.scale(1.0 - t)
    }

    fn size(&self) -> f64 {
        self.norm_inf()
    }
}

impl<P: Mixable, Q: Mixable> Mixable for (P, Q) {
    fn mix(&self, other: &Self, t: f64) -> Self {
        (self.0.mix(&other.0, t), self.1.mix(&other.1, t))
    }

    fn size(&self) -> f64 {
        self.0.size().max(self.1.size())
    }
}

/// Values of a functional: scalars, or Hermitian matrices in the PSD order.
pub trait ConvexValue: Sized {
    /// Convexity gap of `first`, `second` against the value at the mixed point, sign-adjusted
    /// so that a valid claim gives a nonnegative result.
    fn gap(first: &Self, second: &Self, mid: &Self, t: f64, direction: Direction) -> Result<f64>;
}

impl ConvexValue for f64 {
    fn gap(first: &f64, second: &f64, mid: &f64, t: f64, direction: Direction) -> Result<f64> {
        Ok(direction.sign() * (t * first + (1.0 - t) * second - mid))
    }
}

impl ConvexValue for HermitianMatrix {
    fn gap(first: &Self, second: &Self, mid: &Self, t: f64, direction: Direction) -> Result<f64> {
        let chord = first.mix(second, t);
        let diff = match direction {
            Direction::Convex => chord.sub(mid),
            Direction::Concave => mid.sub(&chord),
        };
        min_eigenvalue(&diff)
    }
}

/// Checks joint convexity (or concavity) of `functional(context, ·)` on pairs of points.
///
/// Each sample draws `(context, P₁, P₂)` and tests `t = 1/2` and one uniform `t ∈ (0, 1)`.
/// Deficits are divided by `1 + max(‖P₁‖, ‖P₂‖)`.
pub fn joint_convexity_check<C, P, V, S, F>(
    suite_name: &str,
    config: &SampleConfig,
    epsilon_mix: f64,
    direction: Direction,
    claim: &str,
    sampler: S,
    functional: F,
) -> Result<ConvexityReport>
where
    P: Mixable,
    V: ConvexValue,
    S: Fn(&mut Rng) -> Result<(C, P, P)> + Sync,
    F: Fn(&C, &P) -> Result<V> + Sync,
{
    run_sampled(suite_name, config, epsilon_mix, claim, |_, rng| {
        let (ctx, p1, p2) = sampler(rng)?;
        let t_random = rng.uniform_open();
        let f1 = functional(&ctx, &p1)?;
        let f2 = functional(&ctx, &p2)?;
        let scale = 1.0 + p1.size().max(p2.size());
        let mut worst = (f64::INFINITY, String::new());
        for t in [0.5, t_random] {
            let fm = functional(&ctx, &p1.mix(&p2, t))?;
            let d = V::gap(&f1, &f2, &fm, t, direction)? / scale;
            if is_worse(d, worst.0) {
                worst = (d, format!("t={t:.6}"));
            }
        }
        Ok(worst)
    })
}

/// [`joint_convexity_check`] for matrix-valued maps in the PSD order.
pub fn operator_joint_convexity_check<C, P, S, F>(
    suite_name: &str,
    config: &SampleConfig,
    epsilon_mix: f64,
    claim: &str,
    sampler: S,
    map: F,
) -> Result<ConvexityReport>
where
    P: Mixable,
    S: Fn(&mut Rng) -> Result<(C, P, P)> + Sync,
    F: Fn(&C, &P) -> Result<HermitianMatrix> + Sync,
{
    joint_convexity_check(suite_name, config, epsilon_mix, Direction::Convex, claim, sampler, map)
}

/// Pair of positive definite `d × d` matrices with spectra in the default window.
pub fn pd_pair(rng: &mut Rng, d: usize) -> ((), HermitianMatrix, HermitianMatrix) {
    let (lo, hi) = PD_SPECTRUM;
    ((), random_pd(d, rng, lo, hi), random_pd(d, rng, lo, hi))
}

/// Operator convexity of `f` on `d × d` positive definite matrices with spectra in `[0.1, 10]`.
pub fn operator_convexity_check(
    suite_name: &str,
    f: &OperatorConvexFunction,
    d: usize,
    config: &SampleConfig,
) -> Result<ConvexityReport> {
    f.validate()?;
    let claim = format!("{f} operator convex at d={d}: t f(A)+(1-t) f(B) - f(tA+(1-t)B) >= 0");
    operator_joint_convexity_check(
        suite_name,
        config,
        0.0,
        &claim,
        |rng| Ok(pd_pair(rng, d)),
        |_, a| f.apply(a, config.floor),
    )
}

/// Checks `k(A) ⪰ k(A + C)` for positive definite `A` and positive semidefinite `C`, where `k`
/// is the function `[g(x) + x·g(1/x)]/(x−1)²` of `g`.
pub fn monotone_decreasing_check(
    suite_name: &str,
    g: &OperatorConvexFunction,
    d: usize,
    config: &SampleConfig,
) -> Result<ConvexityReport> {
    g.validate()?;
    let claim = format!("k of {g} operator monotone decreasing at d={d}: k(A) - k(A+C) >= 0");
    run_sampled(suite_name, config, 0.0, &claim, |_, rng| {
        let (lo, hi) = PD_SPECTRUM;
        let a = random_pd(d, rng, lo, hi);
        let rank = 1 + rng.index(d);
        let factor = crate::sampling::random_gaussian(d, rank, rng);
        let gram = HermitianMatrix::symmetrize(&factor * &factor.adjoint());
        let c = gram.scale(rng.uniform_in(0.0, hi) / gram.norm_inf());
        let b = a.add(&c);
        let ka = g.apply_k(&a, config.floor)?;
        let kb = g.apply_k(&b, config.floor)?;
        let d = min_eigenvalue(&ka.sub(&kb))? / (1.0 + b.norm_inf());
        Ok((d, format!("rank C={rank}")))
    })
}

fn check_kiefer_inputs(t: &[f64], xs: &[ComplexMatrix], as_: &[HermitianMatrix]) -> Result<()> {
    if t.len() < 2 || xs.len() != t.len() || as_.len() != t.len() {
        return Err(Error::WeightError(format!(
            "need at least two terms of equal length, got {} weights, {} X, {} A",
            t.len(),
            xs.len(),
            as_.len()
        )));
    }
    if let Some(w) = t.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::WeightError(format!("weight {w} is not positive")));
    }
    let total: f64 = t.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::WeightError(format!("weights sum to {total}")));
    }
    let (d, r) = xs[0].shape();
    for (x, a) in xs.iter().zip(as_) {
        if x.shape() != (d, r) || a.dim() != d {
            return Err(Error::DimMismatch(format!(
                "X is {}x{} and A is {}x{}, expected {d}x{r} and {d}x{d}",
                x.rows(),
                x.cols(),
                a.dim(),
                a.dim()
            )));
        }
        let min = min_eigenvalue(a)?;
        if min <= DEFAULT_FLOOR {
            return Err(Error::DomainViolation {
                value: min,
                floor: DEFAULT_FLOOR,
            });
        }
    }
    Ok(())
}

fn weighted_sum<T: Clone>(t: &[f64], items: &[T], scale: impl Fn(&T, f64) -> T, add: impl Fn(&T, &T) -> T) -> T {
    let mut acc = scale(&items[0], t[0]);
    for (w, item) in t.iter().zip(items).skip(1) {
        acc = add(&acc, &scale(item, *w));
    }
    acc
}

/// `X* A⁻¹ X` via an LU solve.
pub fn kiefer_map(x: &ComplexMatrix, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let y = solve(a, x).map_err(|e| match e {
        Error::Singular => Error::DomainViolation {
            value: 0.0,
            floor: DEFAULT_FLOOR,
        },
        other => other,
    })?;
    Ok(HermitianMatrix::symmetrize(&x.adjoint() * &y))
}

/// `Σ tⱼ Xⱼ* Aⱼ⁻¹ Xⱼ − (Σ tⱼXⱼ)* (Σ tⱼAⱼ)⁻¹ (Σ tⱼXⱼ)`, positive semidefinite for valid input.
pub fn kiefer_deficit(
    t: &[f64],
    xs: &[ComplexMatrix],
    as_: &[HermitianMatrix],
) -> Result<HermitianMatrix> {
    check_kiefer_inputs(t, xs, as_)?;
    let terms: Vec<HermitianMatrix> = xs
        .iter()
        .zip(as_)
        .map(|(x, a)| kiefer_map(x, a))
        .collect::<Result<_>>()?;
    let chord = weighted_sum(t, &terms, |m, w| m.scale(w), |a, b| a.add(b));
    let x_bar = weighted_sum(t, xs, |m, w| m.scale(w), |a, b| a + b);
    let a_bar = weighted_sum(t, as_, |m, w| m.scale(w), |a, b| a.add(b));
    Ok(chord.sub(&kiefer_map(&x_bar, &a_bar)?))
}

/// `‖Σ Mⱼ*Mⱼ − kiefer_deficit‖_∞` with `Mⱼ = √tⱼ (Aⱼ^{−1/2}Xⱼ − Aⱼ^{1/2}Λ)` and
/// `Λ = (Σ tⱼAⱼ)⁻¹(Σ tⱼXⱼ)`. The two expressions agree exactly in exact arithmetic.
pub fn kiefer_mj_identity_residual(
    t: &[f64],
    xs: &[ComplexMatrix],
    as_: &[HermitianMatrix],
) -> Result<f64> {
    let deficit = kiefer_deficit(t, xs, as_)?;
    let x_bar = weighted_sum(t, xs, |m, w| m.scale(w), |a, b| a + b);
    let a_bar = weighted_sum(t, as_, |m, w| m.scale(w), |a, b| a.add(b));
    let lambda = solve(&a_bar, &x_bar)?;
    let mut sum = ComplexMatrix::zeros(x_bar.cols(), x_bar.cols());
    for ((w, x), a) in t.iter().zip(xs).zip(as_) {
        let inv_half = matrix_power(a, -0.5, DEFAULT_FLOOR)?;
        let half = matrix_power(a, 0.5, DEFAULT_FLOOR)?;
        let m = (&(inv_half.as_matrix() * x) - &(half.as_matrix() * &lambda)).scale(w.sqrt());
        sum = &sum + &(&m.adjoint() * &m);
    }
    Ok((&sum - deficit.as_matrix()).norm_inf())
}

/// Shift and clock unitaries of dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylPair {
    pub d: usize,
    pub x_matrix: ComplexMatrix,
    pub z_matrix: ComplexMatrix,
}

fn root_of_unity(k: usize, d: usize) -> C64 {
    C64::from_polar(1.0, TAU * (k % d) as f64 / d as f64)
}

impl WeylPair {
    /// `Xᵐ Zⁿ`, whose only nonzero in row `j` is `ω^{n(j+m)}` at column `j+m mod d`.
    pub fn displacement(&self, m: usize, n: usize) -> ComplexMatrix {
        let d = self.d;
        ComplexMatrix::from_fn(d, d, |j, k| {
            if k == (j + m) % d {
                root_of_unity(n * k, d)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

/// Builds the pair. Panics for `d = 0`.
pub fn weyl_pair(d: usize) -> WeylPair {
    assert!(d >= 1, "Weyl matrices need d >= 1");
    let x_matrix = ComplexMatrix::from_fn(d, d, |j, k| {
        if k == (j + 1) % d {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let z_matrix = ComplexMatrix::from_diag(&(0..d).map(|j| root_of_unity(j, d)).collect::<Vec<_>>());
    WeylPair { d, x_matrix, z_matrix }
}

fn twirl_sum(p: &ComplexMatrix, pair: &WeylPair, embed: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> ComplexMatrix {
    let d = pair.d;
    let mut sum = ComplexMatrix::zeros(p.rows(), p.cols());
    for m in 0..d {
        for n in 0..d {
            let u = embed(&pair.displacement(m, n));
            sum = &sum + &(&(&u * p) * &u.adjoint());
        }
    }
    sum
}

/// `‖Σ_{m,n} XᵐZⁿ P Z⁻ⁿX⁻ᵐ − d (Tr P) I‖_∞`.
pub fn twirl_identity_residual(p: &ComplexMatrix) -> Result<f64> {
    if !p.is_square() {
        return Err(Error::DimMismatch(format!("P is {}x{}", p.rows(), p.cols())));
    }
    let d = p.rows();
    let sum = twirl_sum(p, &weyl_pair(d), |u| u.clone());
    let target = ComplexMatrix::identity(d).scale_c(p.trace() * d as f64);
    Ok((&sum - &target).norm_inf())
}

/// `(1/d₂²) Σ U P₁₂ U*` over `U = I₁ ⊗ XᵐZⁿ`.
pub fn twirl_bipartite(p12: &ComplexMatrix, d1: usize, d2: usize) -> Result<ComplexMatrix> {
    if d1 == 0 || d2 == 0 || p12.shape() != (d1 * d2, d1 * d2) {
        return Err(Error::DimMismatch(format!(
            "P is {}x{}, dims ({d1}, {d2})",
            p12.rows(),
            p12.cols()
        )));
    }
    let eye = ComplexMatrix::identity(d1);
    let sum = twirl_sum(p12, &weyl_pair(d2), |w| kron(&eye, w));
    Ok(sum.scale(1.0 / (d2 * d2) as f64))
}

fn split_last(rho: &MultipartiteState, gamma: &MultipartiteState) -> Result<(usize, usize)> {
    if rho.dims() != gamma.dims() || rho.dims().len() < 2 {
        return Err(Error::DimMismatch(format!(
            "states with dims {:?} and {:?}, need equal dims with at least two factors",
            rho.dims(),
            gamma.dims()
        )));
    }
    let d2 = *rho.dims().last().unwrap();
    Ok((rho.state().dim() / d2, d2))
}

/// `H(ρ, γ) − H(Tr_last ρ, Tr_last γ)`: the drop in relative entropy when the last factor is
/// traced out.
pub fn monotonicity_deficit(rho: &MultipartiteState, gamma: &MultipartiteState) -> Result<f64> {
    split_last(rho, gamma)?;
    let keep: Vec<usize> = (0..rho.dims().len() - 1).collect();
    let full = relative_entropy(rho.state(), gamma.state())?;
    let reduced = relative_entropy(rho.marginal(&keep)?.state(), gamma.marginal(&keep)?.state())?;
    Ok(full - reduced)
}

/// The steps from `H(ρ₁₂, γ₁₂)` down to `H(ρ₁, γ₁)` through the Weyl twirl of the last factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityChain {
    /// `H(ρ₁₂, γ₁₂)`.
    pub full: f64,
    /// `(1/d₂²) Σ H(UρU*, UγU*)`, equal to `full` by unitary invariance.
    pub unitary_mean: f64,
    /// `H(twirl ρ, twirl γ)`, at most `unitary_mean` by joint convexity.
    pub twirled: f64,
    /// `H(ρ₁, γ₁)`, equal to `twirled` because the twirl is `ρ₁ ⊗ I/d₂`.
    pub marginal: f64,
}

impl MonotonicityChain {
    /// Largest violation of the two equalities in the chain.
    pub fn consistency_residual(&self) -> f64 {
        (self.full - self.unitary_mean).abs().max((self.twirled - self.marginal).abs())
    }

    /// `unitary_mean − twirled`, nonnegative by joint convexity.
    pub fn convexity_gap(&self) -> f64 {
        self.unitary_mean - self.twirled
    }
}

pub fn monotonicity_chain(rho: &MultipartiteState, gamma: &MultipartiteState) -> Result<MonotonicityChain> {
    let (d1, d2) = split_last(rho, gamma)?;
    let full = relative_entropy(rho.state(), gamma.state())?;
    let pair = weyl_pair(d2);
    let eye = ComplexMatrix::identity(d1);
    let mut unitary_mean = 0.0;
    for m in 0..d2 {
        for n in 0..d2 {
            let u = kron(&eye, &pair.displacement(m, n));
            let r = rho.state().congruence(&u.adjoint())?;
            let g = gamma.state().congruence(&u.adjoint())?;
            unitary_mean += relative_entropy(&r, &g)?;
        }
    }
    unitary_mean /= (d2 * d2) as f64;
    let tr = HermitianMatrix::symmetrize(twirl_bipartite(rho.state(), d1, d2)?);
    let tg = HermitianMatrix::symmetrize(twirl_bipartite(gamma.state(), d1, d2)?);
    let twirled = relative_entropy(&tr, &tg)?;
    let keep: Vec<usize> = (0..rho.dims().len() - 1).collect();
    let marginal = relative_entropy(rho.marginal(&keep)?.state(), gamma.marginal(&keep)?.state())?;
    Ok(MonotonicityChain {
        full,
        unitary_mean,
        twirled,
        marginal,
    })
}

fn require_tripartite(rho: &MultipartiteState) -> Result<()> {
    if rho.dims().len() != 3 {
        return Err(Error::DimMismatch(format!(
            "expected a tripartite state, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

/// `S(ρ₁₂) + S(ρ₂₃) − S(ρ₁₂₃) − S(ρ₂)` in nats.
pub fn ssa_deficit(rho123: &MultipartiteState) -> Result<f64> {
    require_tripartite(rho123)?;
    let s = |keep: &[usize]| -> Result<f64> { von_neumann_entropy(rho123.marginal(keep)?.state()) };
    Ok(s(&[0, 1])? + s(&[1, 2])? - von_neumann_entropy(rho123.state())? - s(&[1])?)
}

/// The same quantity as [`ssa_deficit`], computed as the monotonicity deficit of
/// `(ρ₁₂₃, I₁/d₁ ⊗ ρ₂₃)` with `ℋ₁ ⊗ ℋ₂` grouped as one factor.
pub fn ssa_via_monotonicity(rho123: &MultipartiteState) -> Result<f64> {
    require_tripartite(rho123)?;
    let dims = rho123.dims();
    let rho23 = rho123.marginal(&[1, 2])?;
    let gamma = DensityMatrix::maximally_mixed(dims[0]).tensor(rho23.state());
    let grouped = vec![dims[0] * dims[1], dims[2]];
    let gamma = MultipartiteState::new(grouped.clone(), gamma)?;
    monotonicity_deficit(&rho123.regroup(grouped)?, &gamma)
}

/// `Tr₁₂[ρ₁₂₃ (ln ρ₁₂₃ − ln ρ₁₂ ⊗ I₃ − I₁ ⊗ ln ρ₂₃ + I₁ ⊗ ln ρ₂ ⊗ I₃)]`, Hermitized, on `ℋ₃`.
pub fn kim_operator(rho123: &MultipartiteState, floor: f64) -> Result<HermitianMatrix> {
    require_tripartite(rho123)?;
    let dims = rho123.dims();
    let (i1, i3) = (ComplexMatrix::identity(dims[0]), ComplexMatrix::identity(dims[2]));
    let log_of = |keep: &[usize]| -> Result<ComplexMatrix> {
        Ok(matrix_log(rho123.marginal(keep)?.state(), floor)?.into_matrix())
    };
    let l123 = matrix_log(rho123.state(), floor)?;
    let l12 = kron(&log_of(&[0, 1])?, &i3);
    let l23 = kron(&i1, &log_of(&[1, 2])?);
    let l2 = kron(&kron(&i1, &log_of(&[1])?), &i3);
    let l = &(&(l123.as_matrix() - &l12) - &l23) + &l2;
    let product = rho123.state().as_matrix() * &l;
    Ok(HermitianMatrix::symmetrize(partial_trace(&product, dims, &[2])?))
}

/// Midpoint-and-random-`t` concavity of `(A, B) ↦ Tr K*AᵖKB^{1−p} / (p(1−p))` on `d × d`
/// positive definite pairs, `d = config.dims[0]`, with a Ginibre `K` drawn per sample.
pub fn lieb_concavity_suite(p_grid: &[f64], config: &SampleConfig) -> Result<ConvexityReport> {
    config.validate()?;
    for &p in p_grid {
        if !(-1.0..=2.0).contains(&p) || p == 0.0 || p == 1.0 {
            return Err(Error::ParameterOutOfRange {
                name: "p",
                value: p,
                range: "[-1, 2] without {0, 1}",
            });
        }
    }
    let d = config.dims[0];
    let mut parts = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let claim = format!("Tr K*A^p K B^(1-p)/(p(1-p)) jointly concave, p={p}, d={d}");
        let report = joint_convexity_check(
            "lieb-concavity",
            config,
            0.0,
            Direction::Concave,
            &claim,
            |rng| {
                let k = crate::sampling::random_ginibre(d, rng);
                let ((), a, b) = pd_pair(rng, d);
                let ((), a2, b2) = pd_pair(rng, d);
                Ok((k, (a, b), (a2, b2)))
            },
            |k, (a, b)| Ok(crate::entropy::lieb_functional(k, a, b, p)? / (p * (1.0 - p))),
        )?;
        parts.push((format!("p={p}"), report));
    }
    Ok(ConvexityReport::worst_of("lieb-concavity", config, parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{mix_with_identity, random_density, random_ginibre, EPSILON_MIX};
    use std::f64::consts::LN_2;

    fn diag(v: &[f64]) -> HermitianMatrix {
        HermitianMatrix::from_real_diag(v)
    }

    fn cfg(seed: u64, dims: Vec<usize>, samples: usize) -> SampleConfig {
        SampleConfig::new(seed, dims, samples)
    }

    fn state(dims: Vec<usize>, rng: &mut Rng) -> MultipartiteState {
        let d = dims.iter().product();
        let rho = mix_with_identity(&random_density(d, rng), EPSILON_MIX);
        MultipartiteState::new(dims, DensityMatrix::new(rho).unwrap()).unwrap()
    }

    #[test]
    fn kiefer_examples() {
        let one = ComplexMatrix::identity(1);
        let d = kiefer_deficit(&[0.5, 0.5], &[one.clone(), one.clone()], &[diag(&[1.0]), diag(&[4.0])]).unwrap();
        assert!((d[(0, 0)].re - 0.225).abs() < 1e-15);

        let mut rng = derive_rng(1, 0);
        let x = random_ginibre(3, &mut rng);
        let a = random_pd(3, &mut rng, 0.1, 10.0);
        let d = kiefer_deficit(&[0.3, 0.7], &[x.clone(), x.clone()], &[a.clone(), a.clone()]).unwrap();
        assert!(d.max_abs() < 1e-12);
        assert!(kiefer_mj_identity_residual(&[0.3, 0.7], &[x.clone(), x.clone()], &[a.clone(), a.clone()]).unwrap() < 1e-12);

        let zero = ComplexMatrix::zeros(3, 2);
        let b = random_pd(3, &mut rng, 0.1, 10.0);
        let d = kiefer_deficit(&[0.5, 0.5], &[zero.clone(), zero.clone()], &[a.clone(), b.clone()]).unwrap();
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn kiefer_errors() {
        let x = ComplexMatrix::identity(2);
        let a = HermitianMatrix::identity(2);
        let xs = [x.clone(), x.clone()];
        let as_ = [a.clone(), a.clone()];
        assert!(matches!(kiefer_deficit(&[0.5, 0.6], &xs, &as_), Err(Error::WeightError(_))));
        assert!(matches!(kiefer_deficit(&[1.0, 0.0], &xs, &as_), Err(Error::WeightError(_))));
        assert!(matches!(kiefer_deficit(&[1.0], &xs[..1], &as_[..1]), Err(Error::WeightError(_))));
        let bad = [x.clone(), ComplexMatrix::identity(3)];
        assert!(matches!(kiefer_deficit(&[0.5, 0.5], &bad, &as_), Err(Error::DimMismatch(_))));
        let singular = [a.clone(), diag(&[1.0, 0.0])];
        assert!(matches!(kiefer_deficit(&[0.5, 0.5], &xs, &singular), Err(Error::DomainViolation { .. })));
    }

    #[test]
    fn kiefer_identity_three_terms() {
        let mut rng = derive_rng(2, 0);
        let t = [0.2, 0.5, 0.3];
        let xs: Vec<_> = (0..3).map(|_| random_ginibre(3, &mut rng)).collect();
        let as_: Vec<_> = (0..3).map(|_| random_pd(3, &mut rng, 0.1, 10.0)).collect();
        assert!(kiefer_mj_identity_residual(&t, &xs, &as_).unwrap() < 1e-9);
        assert!(min_eigenvalue(&kiefer_deficit(&t, &xs, &as_).unwrap()).unwrap() > -1e-9);
    }

    #[test]
    fn weyl_examples() {
        let w = weyl_pair(2);
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(w.x_matrix, x);
        assert!((&w.z_matrix - &ComplexMatrix::from_real_diag(&[1.0, -1.0])).max_abs() < 1e-15);

        let w3 = weyl_pair(3);
        let omega = C64::from_polar(1.0, TAU / 3.0);
        assert!((w3.z_matrix[(1, 1)] - omega).norm() < 1e-15);
        assert!((w3.z_matrix[(2, 2)] - omega * omega).norm() < 1e-15);

        for d in 1..=16 {
            let w = weyl_pair(d);
            let eye = ComplexMatrix::identity(d);
            for u in [&w.x_matrix, &w.z_matrix] {
                assert!((&(u * &u.adjoint()) - &eye).max_abs() < 1e-12);
                assert!((&u.powi(d as u32) - &eye).max_abs() < 1e-10);
            }
            let m = d / 2;
            let n = (d + 1) / 3;
            let direct = &w.x_matrix.powi(m as u32) * &w.z_matrix.powi(n as u32);
            assert!((&direct - &w.displacement(m, n)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn twirl_examples() {
        assert!(twirl_identity_residual(&ComplexMatrix::identity(2)).unwrap() < 1e-12);
        let p0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert!(twirl_identity_residual(&p0).unwrap() < 1e-12);
        let pauli_x = weyl_pair(2).x_matrix;
        let sum = twirl_sum(&pauli_x, &weyl_pair(2), |u| u.clone());
        assert!(sum.max_abs() < 1e-12);
        assert!(twirl_identity_residual(&ComplexMatrix::zeros(2, 3)).is_err());

        let mut rng = derive_rng(3, 0);
        for d in 2..=8 {
            let p = random_ginibre(d, &mut rng);
            assert!(twirl_identity_residual(&p).unwrap() < 1e-11, "d={d}");
        }
    }

    #[test]
    fn twirl_bipartite_examples() {
        let mut rng = derive_rng(4, 0);
        let rho1 = random_density(3, &mut rng);
        let fixed = kron(&rho1, &ComplexMatrix::identity(2).scale(0.5));
        assert!((&twirl_bipartite(&fixed, 3, 2).unwrap() - &fixed).max_abs() < 1e-12);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)];
        let bell = ComplexMatrix::outer(&phi, &phi);
        let tw = twirl_bipartite(&bell, 2, 2).unwrap();
        assert!((&tw - &ComplexMatrix::identity(4).scale(0.25)).max_abs() < 1e-12);

        let rho12 = random_density(6, &mut rng);
        let r1 = partial_trace(&rho12, &[3, 2], &[0]).unwrap();
        let expected = kron(&r1, &ComplexMatrix::identity(2)).scale(0.5);
        assert!((&twirl_bipartite(&rho12, 3, 2).unwrap() - &expected).max_abs() < 1e-10);
        assert!(twirl_bipartite(&rho12, 2, 2).is_err());
    }

    #[test]
    fn monotonicity_examples() {
        let mut rng = derive_rng(5, 0);
        let rho = state(vec![2, 2], &mut rng);
        assert!(monotonicity_deficit(&rho, &rho).unwrap().abs() < 1e-12);

        let r1 = DensityMatrix::new(mix_with_identity(&random_density(2, &mut rng), 1e-3)).unwrap();
        let g1 = DensityMatrix::new(mix_with_identity(&random_density(2, &mut rng), 1e-3)).unwrap();
        let r2 = DensityMatrix::new(mix_with_identity(&random_density(3, &mut rng), 1e-3)).unwrap();
        let rho = MultipartiteState::product(&[r1, r2.clone()]).unwrap();
        let gamma = MultipartiteState::product(&[g1, r2]).unwrap();
        assert!(monotonicity_deficit(&rho, &gamma).unwrap().abs() < 1e-10);

        for _ in 0..20 {
            let rho = state(vec![2, 2], &mut rng);
            let gamma = state(vec![2, 2], &mut rng);
            let deficit = monotonicity_deficit(&rho, &gamma).unwrap();
            assert!(deficit >= -1e-9);
            let chain = monotonicity_chain(&rho, &gamma).unwrap();
            assert!(chain.consistency_residual() < 1e-9);
            assert!(chain.convexity_gap() >= -1e-9);
            assert!((chain.full - chain.marginal - deficit).abs() < 1e-9);
        }
        let other = state(vec![4], &mut rng);
        assert!(monotonicity_deficit(&other, &other).is_err());
    }

    fn ghz() -> MultipartiteState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = vec![C64::new(0.0, 0.0); 8];
        psi[0] = C64::new(s, 0.0);
        psi[7] = C64::new(s, 0.0);
        MultipartiteState::new(vec![2, 2, 2], DensityMatrix::pure(&psi).unwrap()).unwrap()
    }

    #[test]
    fn ssa_examples() {
        assert!((ssa_deficit(&ghz()).unwrap() - LN_2).abs() < 1e-9);

        let mut rng = derive_rng(6, 0);
        let factors: Vec<DensityMatrix> = (0..3)
            .map(|_| DensityMatrix::new(random_density(2, &mut rng)).unwrap())
            .collect();
        let product = MultipartiteState::product(&factors).unwrap();
        assert!(ssa_deficit(&product).unwrap().abs() < 1e-9);

        for _ in 0..20 {
            let rho = state(vec![2, 2, 2], &mut rng);
            let direct = ssa_deficit(&rho).unwrap();
            assert!(direct >= -1e-9);
            assert!((direct - ssa_via_monotonicity(&rho).unwrap()).abs() < 1e-9);
        }
        assert!(ssa_deficit(&state(vec![2, 2], &mut rng)).is_err());
    }

    #[test]
    fn kim_examples() {
        let mut rng = derive_rng(7, 0);
        let factors: Vec<DensityMatrix> = (0..3)
            .map(|_| DensityMatrix::new(mix_with_identity(&random_density(2, &mut rng), 1e-3)).unwrap())
            .collect();
        let product = MultipartiteState::product(&factors).unwrap();
        assert!(kim_operator(&product, 1e-12).unwrap().max_abs() < 1e-9);

        let rho12 = DensityMatrix::new(mix_with_identity(&random_density(4, &mut rng), 1e-3)).unwrap();
        let partial = MultipartiteState::new(vec![2, 2, 2], rho12.tensor(&factors[2])).unwrap();
        assert!(kim_operator(&partial, 1e-12).unwrap().max_abs() < 1e-9);

        for _ in 0..20 {
            let rho = state(vec![2, 2, 2], &mut rng);
            let k = kim_operator(&rho, 1e-12).unwrap();
            assert_eq!(k.dim(), 2);
            assert!(min_eigenvalue(&k).unwrap() >= -1e-8);
        }
    }

    #[test]
    fn engine_reduction_is_deterministic_and_picks_first_minimum() {
        let config = cfg(9, vec![2], 50);
        let run = || {
            run_sampled("probe", &config, 0.0, "probe", |i, rng| {
                let v = rng.uniform();
                Ok((if i % 10 == 3 { -1.0 } else { v }, format!("i={i}")))
            })
            .unwrap()
        };
        let a = run();
        assert_eq!(a, run());
        assert_eq!(a.worst_sample_index, 3);
        assert_eq!(a.worst_deficit, -1.0);
        assert!(!a.pass);

        let failing = run_sampled("probe", &config, 0.0, "probe", |i, _| {
            if i >= 7 { Err(Error::Singular) } else { Ok((0.0, String::new())) }
        })
        .unwrap();
        assert_eq!(failing.worst_sample_index, 7);
        assert!(!failing.pass);
        assert!(failing.notes.contains("singular"));
    }

    #[test]
    fn identical_points_give_zero_deficit() {
        let config = cfg(10, vec![3], 10);
        let report = joint_convexity_check(
            "probe",
            &config,
            0.0,
            Direction::Convex,
            "relative entropy",
            |rng| {
                let ((), a, b) = pd_pair(rng, 3);
                Ok(((), (a.clone(), b.clone()), (a, b)))
            },
            |_, (a, b)| relative_entropy(a, b),
        )
        .unwrap();
        assert!(report.worst_deficit.abs() < 1e-12);

        let report = operator_joint_convexity_check(
            "probe",
            &config,
            0.0,
            "kiefer",
            |rng| {
                let x = random_ginibre(3, rng);
                let ((), a, _) = pd_pair(rng, 3);
                Ok(((), (x.clone(), a.clone()), (x, a)))
            },
            |_, (x, a)| kiefer_map(x, a),
        )
        .unwrap();
        assert!(report.worst_deficit.abs() < 1e-12);
    }

    #[test]
    fn operator_convexity_of_linear_and_square() {
        let config = cfg(11, vec![4], 30);
        let lin = operator_convexity_check("probe", &OperatorConvexFunction::Linear(2.0), 4, &config).unwrap();
        assert!(lin.worst_deficit.abs() < 1e-10);
        let sq = operator_convexity_check("probe", &OperatorConvexFunction::Gp(2.0), 4, &config).unwrap();
        assert!(sq.pass, "{sq:?}");
    }

    #[test]
    fn monotone_decreasing_scalar() {
        let g = OperatorConvexFunction::XLogX;
        let k1 = g.apply_k(&diag(&[1.0]), 1e-12).unwrap()[(0, 0)].re;
        let k2 = g.apply_k(&diag(&[2.0]), 1e-12).unwrap()[(0, 0)].re;
        assert!((k1 - 1.0).abs() < 1e-12);
        assert!((k2 - LN_2).abs() < 1e-12);
        let report = monotone_decreasing_check("probe", &OperatorConvexFunction::Gp(1.5), 3, &cfg(12, vec![3], 50)).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn lieb_suite_rejects_limit_points() {
        let config = cfg(13, vec![2], 5);
        assert!(matches!(lieb_concavity_suite(&[0.5, 1.0], &config), Err(Error::ParameterOutOfRange { .. })));
        assert!(lieb_concavity_suite(&[0.5, 2.0], &config).unwrap().pass);
    }

    #[test]
    fn worst_of_keeps_failures() {
        let config = cfg(0, vec![2], 1);
        let mk = |d: f64| ConvexityReport::new("x", &config, 0.0, d, 0, String::new());
        let merged = ConvexityReport::worst_of("x", &config, vec![("a".into(), mk(1.0)), ("b".into(), mk(-1.0))]);
        assert_eq!(merged.worst_deficit, -1.0);
        assert!(merged.notes.contains("worst b"));
        assert!(!merged.pass);
    }
}
