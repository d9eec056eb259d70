//! Named verification suites.
//!
//! Every suite is a function of a [`SampleConfig`] only. Suites over a single space use
//! `dims[0]`; suites over two or three factors use the leading entries of `dims`, repeating the
//! last entry when fewer are given. Deficits are divided by `1 + ` the largest input ∞-norm of
//! the sample before comparison with `config.tol`.

use crate::entropy::{
    quasi_entropy, relative_entropy, trace_functional, wyd_entropy, DensityMatrix,
    MultipartiteState, TraceFunctional,
};
use crate::error::{Error, Result};
use crate::functions::{integral_log, OperatorConvexFunction};
use crate::linalg::{
    inner, inverse, kron, matrix_log, min_eigenvalue, partial_trace, vec, ComplexMatrix,
    HermitianMatrix,
};
use crate::sampling::{
    mix_with_identity, random_density, random_gaussian, random_ginibre, random_hermitian,
    random_pd, Rng, SampleConfig, EPSILON_MIX, PD_SPECTRUM,
};
use crate::verify::{
    joint_convexity_check, kiefer_deficit, kiefer_mj_identity_residual, kim_operator,
    lieb_concavity_suite, monotone_decreasing_check, monotonicity_chain, operator_convexity_check,
    operator_joint_convexity_check, pd_pair, run_sampled, ssa_deficit, ssa_via_monotonicity,
    twirl_bipartite, twirl_identity_residual, ConvexityReport, Direction,
};

/// Quadrature order used by the `integral-log` suite.
pub const INTEGRAL_LOG_POINTS: usize = 128;

/// Error budget of the `integral-log` suite; its deficit is this budget minus the error.
pub const INTEGRAL_LOG_BUDGET: f64 = 1e-6;

/// Largest matrix side drawn by the `ando-identity` suite.
pub const ANDO_MAX_DIM: usize = 6;

type SuiteFn = fn(&SampleConfig) -> Result<ConvexityReport>;

/// A registry entry.
#[derive(Clone, Copy)]
pub struct SuiteInfo {
    pub name: &'static str,
    pub description: &'static str,
    /// Calibration suites are expected to fail and are left out of `--all`.
    pub calibration: bool,
    run: SuiteFn,
}

impl SuiteInfo {
    pub fn run(&self, config: &SampleConfig) -> Result<ConvexityReport> {
        (self.run)(config)
    }
}

impl std::fmt::Debug for SuiteInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SuiteInfo")
            .field("name", &self.name)
            .field("calibration", &self.calibration)
            .finish()
    }
}

const fn suite(name: &'static str, description: &'static str, run: SuiteFn) -> SuiteInfo {
    SuiteInfo {
        name,
        description,
        calibration: false,
        run,
    }
}

static REGISTRY: [SuiteInfo; 20] = [
    suite("kiefer", "(X, A) -> X*A^-1 X jointly convex; J in {2,3,4} terms, d = dims[0]", kiefer),
    suite("kiefer-identity", "sum of M_j* M_j equals the Kiefer deficit; same instances as kiefer", kiefer_identity),
    suite("op-convex-gp", "g_p operator convex, p in {0.3, 1, 1.7, 2}, d = dims[0]", op_convex_gp),
    suite("op-convex-hq", "h_q operator convex, q in {-1, -0.4, 0.5}, d = dims[0]", op_convex_hq),
    suite("perspective", "(A, B) -> (I (x) conj B) g(A (x) conj B^-1) jointly convex; A on dims[0], B on dims[1]", perspective),
    suite("sec4-a", "(Tr K*AK - Tr K*A^p K B^(1-p))/(1-p) jointly convex, p in {0.5, 1.5, 2}", sec4_a),
    suite("sec4-b", "Tr K*(A log A)K - Tr K*AK log B jointly convex", sec4_b),
    suite("sec4-c", "(Tr K*KB - Tr K*A^q K B^(1-q))/q jointly convex, q in {-1, -0.5, 0.5}", sec4_c),
    suite("sec4-d", "Tr K*K(B log B) - Tr K*(log A)KB jointly convex", sec4_d),
    suite("lieb-concavity", "Tr K*A^p K B^(1-p)/(p(1-p)) jointly concave, p in {-1, -0.5, 0.5, 1.5, 2}", lieb),
    suite("wyd", "skew information concave in the state, p in {0.25, 0.5, 0.75}", wyd),
    suite("quasi-symmetry", "H_tilde(g)(K, A, B) = H_g(K*, B, A) and quasi-entropy of x log x is relative entropy", quasi_symmetry),
    suite("k-monotone", "k(x) = [g(x) + x g(1/x)]/(x-1)^2 operator monotone decreasing", k_monotone),
    suite("twirl", "Weyl twirl sums to d Tr(P) I for d in 2..=8 and reproduces the partial trace", twirl),
    suite("monotonicity", "relative entropy decreases under the partial trace, through the twirl chain", monotonicity),
    suite("ssa", "strong subadditivity, directly and as a monotonicity deficit", ssa),
    suite("kim", "Tr_12[rho_123 (log rho_123 - log rho_12 - log rho_23 + log rho_2)] >= 0 on factor 3", kim),
    suite("integral-log", "quadrature of the integral representation of log within 1e-6", integral_log_suite),
    suite("ando-identity", "<vec K, (A (x) B^T) vec K> = Tr K*AKB for m, n <= 6", ando_identity),
    SuiteInfo {
        name: "calibration-negative",
        description: "x^3 operator convexity and joint convexity of -Tr A^-1; expected to fail",
        calibration: true,
        run: calibration_negative,
    },
];

/// All registered suites in a fixed order.
pub fn registry() -> &'static [SuiteInfo] {
    &REGISTRY
}

pub fn find_suite(name: &str) -> Result<&'static SuiteInfo> {
    REGISTRY
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownSuite(name.to_string()))
}

/// Runs the named suite. Failures inside samples become failing reports; only an unknown name
/// or an invalid configuration is an error.
pub fn run_suite(name: &str, config: &SampleConfig) -> Result<ConvexityReport> {
    let info = find_suite(name)?;
    config.validate()?;
    info.run(config)
}

fn dim(config: &SampleConfig, i: usize) -> usize {
    config
        .dims
        .get(i)
        .or(config.dims.last())
        .copied()
        .unwrap_or(2)
}

fn mixed_density(d: usize, rng: &mut Rng) -> HermitianMatrix {
    mix_with_identity(&random_density(d, rng), EPSILON_MIX)
}

fn mixed_state(dims: Vec<usize>, rng: &mut Rng) -> Result<MultipartiteState> {
    let d = dims.iter().product();
    MultipartiteState::new(dims, DensityMatrix::new(mixed_density(d, rng))?)
}

/// Weights, `X`s and `A`s of one Kiefer instance.
pub type KieferInstance = (Vec<f64>, Vec<ComplexMatrix>, Vec<HermitianMatrix>);

/// `J ∈ {2, 3, 4}` terms with weights bounded away from zero, Gaussian `d × d` `X`s and positive
/// definite `A`s.
pub fn kiefer_instance(d: usize, rng: &mut Rng) -> KieferInstance {
    let j = 2 + rng.index(3);
    let raw: Vec<f64> = (0..j).map(|_| rng.uniform_in(0.05, 1.0)).collect();
    let total: f64 = raw.iter().sum();
    let t = raw.iter().map(|w| w / total).collect();
    let (lo, hi) = PD_SPECTRUM;
    let xs = (0..j).map(|_| random_gaussian(d, d, rng)).collect();
    let as_ = (0..j).map(|_| random_pd(d, rng, lo, hi)).collect();
    (t, xs, as_)
}

fn kiefer_scale(xs: &[ComplexMatrix], as_: &[HermitianMatrix]) -> f64 {
    let x = xs.iter().map(|x| x.norm_inf()).fold(0.0, f64::max);
    let a = as_.iter().map(|a| a.norm_inf()).fold(0.0, f64::max);
    1.0 + x.max(a)
}

fn kiefer(config: &SampleConfig) -> Result<ConvexityReport> {
    let d = dim(config, 0);
    let claim = format!("sum t_j X_j*A_j^-1 X_j - Xbar*Abar^-1 Xbar >= 0 at d={d}");
    run_sampled("kiefer", config, 0.0, &claim, |_, rng| {
        let (t, xs, as_) = kiefer_instance(d, rng);
        let deficit = min_eigenvalue(&kiefer_deficit(&t, &xs, &as_)?)?;
        Ok((deficit / kiefer_scale(&xs, &as_), format!("J={}", t.len())))
    })
}

fn kiefer_identity(config: &SampleConfig) -> Result<ConvexityReport> {
    let d = dim(config, 0);
    let claim = format!("-|sum M_j*M_j - Kiefer deficit| >= 0 at d={d}");
    run_sampled("kiefer-identity", config, 0.0, &claim, |_, rng| {
        let (t, xs, as_) = kiefer_instance(d, rng);
        let residual = kiefer_mj_identity_residual(&t, &xs, &as_)?;
        Ok((-residual / kiefer_scale(&xs, &as_), format!("J={}", t.len())))
    })
}

fn op_convex_grid(
    name: &str,
    config: &SampleConfig,
    functions: Vec<OperatorConvexFunction>,
) -> Result<ConvexityReport> {
    let d = dim(config, 0);
    let parts = functions
        .into_iter()
        .map(|f| Ok((f.to_string(), operator_convexity_check(name, &f, d, config)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvexityReport::worst_of(name, config, parts))
}

fn op_convex_gp(config: &SampleConfig) -> Result<ConvexityReport> {
    let fs = [0.3, 1.0, 1.7, 2.0].map(OperatorConvexFunction::Gp).to_vec();
    op_convex_grid("op-convex-gp", config, fs)
}

fn op_convex_hq(config: &SampleConfig) -> Result<ConvexityReport> {
    let fs = [-1.0, -0.4, 0.5].map(OperatorConvexFunction::Hq).to_vec();
    op_convex_grid("op-convex-hq", config, fs)
}

fn perspective(config: &SampleConfig) -> Result<ConvexityReport> {
    let (d1, d2) = (dim(config, 0), dim(config, 1));
    let (lo, hi) = PD_SPECTRUM;
    let catalog = [
        OperatorConvexFunction::XLogX,
        OperatorConvexFunction::NegLog,
        OperatorConvexFunction::Gp(1.5),
        OperatorConvexFunction::Hq(-1.0),
    ];
    let mut parts = Vec::new();
    for g in catalog {
        let claim = format!("perspective of {g} operator jointly convex, dims ({d1}, {d2})");
        let report = operator_joint_convexity_check(
            "perspective",
            config,
            0.0,
            &claim,
            |rng| {
                let mut draw = || (random_pd(d1, rng, lo, hi), random_pd(d2, rng, lo, hi));
                let (p1, p2) = (draw(), draw());
                Ok(((), p1, p2))
            },
            |_, (a, b)| crate::entropy::perspective_map(&g, a, b),
        )?;
        parts.push((g.to_string(), report));
    }
    Ok(ConvexityReport::worst_of("perspective", config, parts))
}

fn trace_suite(name: &str, config: &SampleConfig, example: TraceFunctional, grid: &[f64]) -> Result<ConvexityReport> {
    let d = dim(config, 0);
    let mut parts = Vec::new();
    for &param in grid {
        let claim = format!("functional ({example}) jointly convex in (A, B), param={param}, d={d}");
        let report = joint_convexity_check(
            name,
            config,
            0.0,
            Direction::Convex,
            &claim,
            |rng| {
                let k = random_ginibre(d, rng);
                let ((), a1, b1) = pd_pair(rng, d);
                let ((), a2, b2) = pd_pair(rng, d);
                Ok((k, (a1, b1), (a2, b2)))
            },
            |k, (a, b)| trace_functional(example, k, a, b, param),
        )?;
        parts.push((format!("param={param}"), report));
    }
    Ok(ConvexityReport::worst_of(name, config, parts))
}

fn sec4_a(config: &SampleConfig) -> Result<ConvexityReport> {
    trace_suite("sec4-a", config, TraceFunctional::A, &[0.5, 1.5, 2.0])
}

fn sec4_b(config: &SampleConfig) -> Result<ConvexityReport> {
    trace_suite("sec4-b", config, TraceFunctional::B, &[0.0])
}

fn sec4_c(config: &SampleConfig) -> Result<ConvexityReport> {
    trace_suite("sec4-c", config, TraceFunctional::C, &[-1.0, -0.5, 0.5])
}

fn sec4_d(config: &SampleConfig) -> Result<ConvexityReport> {
    trace_suite("sec4-d", config, TraceFunctional::D, &[0.0])
}

fn lieb(config: &SampleConfig) -> Result<ConvexityReport> {
    lieb_concavity_suite(&[-1.0, -0.5, 0.5, 1.5, 2.0], config)
}

fn wyd(config: &SampleConfig) -> Result<ConvexityReport> {
    let d = dim(config, 0);
    let mut parts = Vec::new();
    for p in [0.25, 0.5, 0.75] {
        let claim = format!("skew information concave in the state at fixed Hermitian K, p={p}, d={d}");
        let report = joint_convexity_check(
            "wyd",
            config,
            EPSILON_MIX,
            Direction::Concave,
            &claim,
            |rng| {
                let k = random_hermitian(d, rng);
                Ok((k, mixed_density(d, rng), mixed_density(d, rng)))
            },
            |k, gamma| wyd_entropy(k, &DensityMatrix::new(gamma.clone())?, p),
        )?;
        parts.push((format!("p={p}"), report));
    }
    Ok(ConvexityReport::worst_of("wyd", config, parts))
}

fn quasi_symmetry(config: &SampleConfig) -> Result<ConvexityReport> {
    let (d1, d2) = (dim(config, 0), dim(config, 1));
    let (lo, hi) = PD_SPECTRUM;
    let catalog = [
        OperatorConvexFunction::XLogX,
        OperatorConvexFunction::Gp(0.5),
        OperatorConvexFunction::Gp(1.5),
        OperatorConvexFunction::Hq(-1.0),
    ];
    let claim = format!(
        "-|H_tilde(g)(K,A,B) - H_g(K*,B,A)| and -|H_xlogx(I,A,B) - H(A,B)| >= 0, dims ({d1}, {d2})"
    );
    run_sampled("quasi-symmetry", config, 0.0, &claim, |_, rng| {
        let a = random_pd(d1, rng, lo, hi);
        let b = random_pd(d2, rng, lo, hi);
        let k = random_gaussian(d1, d2, rng);
        let kh = random_hermitian(d1, rng);
        let b1 = random_pd(d1, rng, lo, hi);
        let scale = 1.0 + a.norm_inf().max(b.norm_inf()).max(b1.norm_inf()).max(k.norm_inf());
        let mut worst = (0.0, String::new());
        let mut record = |err: f64, what: String| {
            if err > worst.0 {
                worst = (err, what);
            }
        };
        for g in &catalog {
            let tilde = g.clone().tilde();
            let lhs = quasi_entropy(&tilde, &k, &a, &b)?;
            let rhs = quasi_entropy(g, &k.adjoint(), &b, &a)?;
            record((lhs - rhs).abs(), format!("{g}, general K"));
            let lhs = quasi_entropy(&tilde, &kh, &a, &b1)?;
            let rhs = quasi_entropy(g, &kh, &b1, &a)?;
            record((lhs - rhs).abs(), format!("{g}, Hermitian K"));
        }
        let eye = ComplexMatrix::identity(d1);
        let h = quasi_entropy(&OperatorConvexFunction::XLogX, &eye, &a, &b1)?;
        record((h - relative_entropy(&a, &b1)?).abs(), "x log x vs relative entropy".into());
        let h = quasi_entropy(&OperatorConvexFunction::NegLog, &eye, &a, &b1)?;
        record((h - relative_entropy(&b1, &a)?).abs(), "-log x vs reversed relative entropy".into());
        Ok((-worst.0 / scale, worst.1))
    })
}

fn k_monotone(config: &SampleConfig) -> Result<ConvexityReport> {
    let d = dim(config, 0);
    let catalog = [
        OperatorConvexFunction::XLogX,
        OperatorConvexFunction::Gp(0.5),
        OperatorConvexFunction::Gp(1.5),
        OperatorConvexFunction::Hq(-1.0),
    ];
    let parts = catalog
        .iter()
        .map(|g| Ok((g.to_string(), monotone_decreasing_check("k-monotone", g, d, config)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvexityReport::worst_of("k-monotone", config, parts))
}

fn twirl(config: &SampleConfig) -> Result<ConvexityReport> {
    let (d1, d2) = (dim(config, 0), dim(config, 1));
    let claim = format!(
        "-|twirl sum - d Tr(P) I| for d = 2 + i mod 7, and -|twirl - rho_1 (x) I/d2| at dims ({d1}, {d2})"
    );
    run_sampled("twirl", config, 0.0, &claim, |i, rng| {
        let d = 2 + i % 7;
        let p = random_gaussian(d, d, rng);
        let single = twirl_identity_residual(&p)? / (1.0 + p.norm_inf());
        let rho = random_density(d1 * d2, rng);
        let twirled = twirl_bipartite(&rho, d1, d2)?;
        let r1 = partial_trace(&rho, &[d1, d2], &[0])?;
        let expected = kron(&r1, &ComplexMatrix::identity(d2)).scale(1.0 / d2 as f64);
        let bipartite = (&twirled - &expected).norm_inf() / (1.0 + rho.norm_inf());
        Ok(if single >= bipartite {
            (-single, format!("single factor, d={d}"))
        } else {
            (-bipartite, "bipartite".to_string())
        })
    })
}

fn monotonicity(config: &SampleConfig) -> Result<ConvexityReport> {
    let dims = vec![dim(config, 0), dim(config, 1)];
    let claim = format!(
        "H(rho12,gamma12) - H(rho1,gamma1), the twirl convexity gap and -|chain residual| >= 0 at dims {dims:?}"
    );
    run_sampled("monotonicity", config, EPSILON_MIX, &claim, |_, rng| {
        let rho = mixed_state(dims.clone(), rng)?;
        let gamma = mixed_state(dims.clone(), rng)?;
        let chain = monotonicity_chain(&rho, &gamma)?;
        let scale = 1.0 + rho.state().norm_inf().max(gamma.state().norm_inf());
        let candidates = [
            (chain.full - chain.marginal, "monotonicity"),
            (chain.convexity_gap(), "twirl convexity gap"),
            (-chain.consistency_residual(), "chain consistency"),
        ];
        let (d, what) = candidates
            .iter()
            .fold(candidates[0], |w, c| if c.0 < w.0 { *c } else { w });
        Ok((d / scale, what.to_string()))
    })
}

fn ssa(config: &SampleConfig) -> Result<ConvexityReport> {
    let dims = vec![dim(config, 0), dim(config, 1), dim(config, 2)];
    let claim = format!(
        "S12 + S23 - S123 - S2 >= 0 and -|that - monotonicity form| >= 0 at dims {dims:?}"
    );
    run_sampled("ssa", config, EPSILON_MIX, &claim, |_, rng| {
        let rho = mixed_state(dims.clone(), rng)?;
        let direct = ssa_deficit(&rho)?;
        let mismatch = (direct - ssa_via_monotonicity(&rho)?).abs();
        let scale = 1.0 + rho.state().norm_inf();
        Ok(if direct <= -mismatch {
            (direct / scale, "ssa".to_string())
        } else {
            (-mismatch / scale, "monotonicity form".to_string())
        })
    })
}

fn kim(config: &SampleConfig) -> Result<ConvexityReport> {
    let dims = vec![dim(config, 0), dim(config, 1), dim(config, 2)];
    let claim = format!("smallest eigenvalue of the operator on factor 3 >= 0 at dims {dims:?}");
    run_sampled("kim", config, EPSILON_MIX, &claim, |_, rng| {
        let rho = mixed_state(dims.clone(), rng)?;
        let k = kim_operator(&rho, config.floor)?;
        Ok((min_eigenvalue(&k)? / (1.0 + rho.state().norm_inf()), String::new()))
    })
}

fn integral_log_suite(config: &SampleConfig) -> Result<ConvexityReport> {
    let d = dim(config, 0);
    let claim = format!(
        "{INTEGRAL_LOG_BUDGET:e} - |quadrature log - spectral log| >= 0 with {INTEGRAL_LOG_POINTS} nodes at d={d}"
    );
    run_sampled("integral-log", config, 0.0, &claim, |_, rng| {
        let (lo, hi) = PD_SPECTRUM;
        let a = random_pd(d, rng, lo, hi);
        let quad = integral_log(&a, INTEGRAL_LOG_POINTS, config.floor)?;
        let exact = matrix_log(&a, config.floor)?;
        Ok((INTEGRAL_LOG_BUDGET - quad.sub(&exact).norm_inf(), String::new()))
    })
}

/// `⟨vec K, (A ⊗ Bᵀ) vec K⟩` and `Tr K*AKB`.
pub fn ando_sides(k: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<(crate::C64, crate::C64)> {
    let v = vec(k);
    let lhs = inner(&v, &kron(a, &b.transpose()).matvec(&v)?);
    let rhs = (&(&k.adjoint() * a) * k).trace_product(b)?;
    Ok((lhs, rhs))
}

fn ando_identity(config: &SampleConfig) -> Result<ConvexityReport> {
    let claim = format!(
        "-|<vec K, (A (x) B^T) vec K> - Tr K*AKB| / (|K|_F^2 |A| |B|) >= 0, m, n <= {ANDO_MAX_DIM}"
    );
    run_sampled("ando-identity", config, 0.0, &claim, |_, rng| {
        let m = 1 + rng.index(ANDO_MAX_DIM);
        let n = 1 + rng.index(ANDO_MAX_DIM);
        let a = random_ginibre(m, rng);
        let b = random_ginibre(n, rng);
        let k = random_gaussian(m, n, rng);
        let (lhs, rhs) = ando_sides(&k, &a, &b)?;
        let scale = k.norm_fro().powi(2) * a.norm_inf() * b.norm_inf();
        Ok((-(lhs - rhs).norm() / scale, format!("m={m}, n={n}")))
    })
}

fn calibration_negative(config: &SampleConfig) -> Result<ConvexityReport> {
    let d = dim(config, 0);
    let cubic = operator_convexity_check("calibration-negative", &OperatorConvexFunction::Power(3.0), d, config)?;
    let trace_inverse = joint_convexity_check(
        "calibration-negative",
        config,
        0.0,
        Direction::Convex,
        &format!("-Tr A^-1 jointly convex in (A, B) at d={d} (false)"),
        |rng| {
            let ((), a1, b1) = pd_pair(rng, d);
            let ((), a2, b2) = pd_pair(rng, d);
            Ok(((), (a1, b1), (a2, b2)))
        },
        |_, (a, _b): &(HermitianMatrix, HermitianMatrix)| Ok(-inverse(a)?.trace().re),
    )?;
    Ok(ConvexityReport::worst_of(
        "calibration-negative",
        config,
        vec![("x^3".into(), cubic), ("-Tr A^-1".into(), trace_inverse)],
    ))
}
