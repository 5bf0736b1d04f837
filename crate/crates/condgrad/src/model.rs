//! Core data types for composite problems `min f(x) + Ψ(x)` and validation of
//! the standing assumptions: `f` differentiable on dom(Ψ), and a computable
//! linear minimization oracle `g ↦ argmin_y {⟨g,y⟩ + Ψ(y)}`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, dot, norm2};
use crate::real::Real;
use crate::{Error, Result, Vector};

/// Extended real: a finite scalar or the `+∞` flag. Arithmetic that would mix
/// flags is rejected rather than propagated, so infinities never contaminate
/// downstream computations as NaNs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value<S> {
    Finite(S),
    Infinite,
}

impl<S: Real> Value<S> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Value::Finite(_))
    }

    pub fn finite(&self) -> Option<S> {
        match self {
            Value::Finite(v) => Some(*v),
            Value::Infinite => None,
        }
    }

    pub fn expect_finite(&self, what: &str) -> Result<S> {
        self.finite()
            .ok_or_else(|| Error::Domain(format!("{what} is infinite (outside the domain)")))
    }
}

/// Norms that metadata constants may be stated in. Constants are meaningless
/// without their norm, so the two always travel together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormTag {
    L1,
    L2,
    Lp(f64),
    LInf,
}

/// Uniform smoothness certificate: `D_f(y,x) ≤ (L/q)·‖y-x‖^q` on dom(Ψ),
/// with exponent `q ∈ (1,2]` in the tagged norm.
#[derive(Debug, Clone, Copy)]
pub struct Smoothness<S> {
    pub q: S,
    pub l: S,
    pub norm: NormTag,
}

/// Uniform convexity certificate with exponent `p ≥ 2` and constant `μ > 0`,
/// for either the function Ψ (`of_set = false`) or the feasible set
/// (`of_set = true`).
#[derive(Debug, Clone, Copy)]
pub struct Convexity<S> {
    pub p: S,
    pub mu: S,
    pub norm: NormTag,
    pub of_set: bool,
}

/// Hölderian error bound: `dist(x, X⋆) ≤ K·(f(x) - f⋆)^γ` on the feasible set.
#[derive(Debug, Clone, Copy)]
pub struct ErrorBound<S> {
    pub gamma: S,
    pub k: S,
    pub norm: NormTag,
}

/// Local scaling certificate: `⟨∇f(x⋆), x - x⋆⟩ ≥ σ·‖x - x⋆‖^p` on the
/// feasible set, with `∇f` being ν-Hölder continuous.
#[derive(Debug, Clone, Copy)]
pub struct LocalScaling<S> {
    pub sigma: S,
    pub nu: S,
    pub p: S,
    pub norm: NormTag,
}

/// Optional regularity constants attached to an instance. Everything is
/// optional; the analysis layer reports a missing field by name when a
/// certificate formula needs it.
#[derive(Debug, Clone)]
pub struct InstanceMetadata<S> {
    pub smoothness: Option<Smoothness<S>>,
    pub convexity: Option<Convexity<S>>,
    /// Diameter of dom(Ψ) in the smoothness norm, when bounded.
    pub diameter: Option<S>,
    /// `ℓ = inf_{x ∈ dom(Ψ)} ‖∇f(x)‖*`, when known positive.
    pub grad_lower_bound: Option<S>,
    pub error_bound: Option<ErrorBound<S>>,
    pub local_scaling: Option<LocalScaling<S>>,
}

impl<S: Real> InstanceMetadata<S> {
    pub fn empty() -> Self {
        InstanceMetadata {
            smoothness: None,
            convexity: None,
            diameter: None,
            grad_lower_bound: None,
            error_bound: None,
            local_scaling: None,
        }
    }
}

type ValueFn<S> = Box<dyn Fn(&[S]) -> S + Send + Sync>;
type ExtValueFn<S> = Box<dyn Fn(&[S]) -> Value<S> + Send + Sync>;
type VectorFn<S> = Box<dyn Fn(&[S]) -> Vector<S> + Send + Sync>;
type MemberFn<S> = Box<dyn Fn(&[S]) -> bool + Send + Sync>;
type SegmentMinFn<S> = Box<dyn Fn(&[S], &[S]) -> S + Send + Sync>;

/// The smooth part `f`: value and gradient oracles. Oracles must be pure and
/// finite on dom(Ψ).
pub struct SmoothObjective<S> {
    value: ValueFn<S>,
    gradient: VectorFn<S>,
}

impl<S: Real> SmoothObjective<S> {
    pub fn new(
        value: impl Fn(&[S]) -> S + Send + Sync + 'static,
        gradient: impl Fn(&[S]) -> Vector<S> + Send + Sync + 'static,
    ) -> Self {
        SmoothObjective { value: Box::new(value), gradient: Box::new(gradient) }
    }

    pub fn value(&self, x: &[S]) -> S {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[S]) -> Vector<S> {
        (self.gradient)(x)
    }
}

/// The composite part `Ψ`: extended-real value, linear minimization oracle,
/// and domain membership test. When `is_indicator` is set, the value is 0 on
/// the domain and `+∞` outside.
pub struct CompositePart<S> {
    value: ExtValueFn<S>,
    lmo: VectorFn<S>,
    contains: MemberFn<S>,
    is_indicator: bool,
}

impl<S: Real> CompositePart<S> {
    pub fn new(
        value: impl Fn(&[S]) -> Value<S> + Send + Sync + 'static,
        lmo: impl Fn(&[S]) -> Vector<S> + Send + Sync + 'static,
        contains: impl Fn(&[S]) -> bool + Send + Sync + 'static,
        is_indicator: bool,
    ) -> Self {
        CompositePart {
            value: Box::new(value),
            lmo: Box::new(lmo),
            contains: Box::new(contains),
            is_indicator,
        }
    }

    /// Indicator of a set: value 0 inside, `+∞` outside.
    pub fn indicator(
        contains: impl Fn(&[S]) -> bool + Send + Sync + Clone + 'static,
        lmo: impl Fn(&[S]) -> Vector<S> + Send + Sync + 'static,
    ) -> Self {
        let member = contains.clone();
        CompositePart {
            value: Box::new(move |x| {
                if member(x) {
                    Value::Finite(S::zero())
                } else {
                    Value::Infinite
                }
            }),
            lmo: Box::new(lmo),
            contains: Box::new(contains),
            is_indicator: true,
        }
    }

    pub fn value(&self, x: &[S]) -> Value<S> {
        (self.value)(x)
    }

    pub fn lmo(&self, g: &[S]) -> Vector<S> {
        (self.lmo)(g)
    }

    pub fn contains(&self, x: &[S]) -> bool {
        (self.contains)(x)
    }

    pub fn is_indicator(&self) -> bool {
        self.is_indicator
    }
}

/// A known optimum `(x⋆, f(x⋆)+Ψ(x⋆))`.
#[derive(Debug, Clone)]
pub struct Optimum<S> {
    pub point: Vector<S>,
    pub value: S,
}

/// A composite problem with oracle access. Immutable after construction;
/// oracles must be pure, so a `Problem` is safe to share across threads.
pub struct Problem<S> {
    pub f: SmoothObjective<S>,
    pub psi: CompositePart<S>,
    pub dim: usize,
    pub optimum: Option<Optimum<S>>,
    pub metadata: InstanceMetadata<S>,
    pub id: String,
    /// Canonical feasible point, used as a default start.
    pub reference_point: Vector<S>,
    segment_minimizer: Option<SegmentMinFn<S>>,
}

impl<S: Real> Problem<S> {
    pub fn new(
        id: impl Into<String>,
        dim: usize,
        f: SmoothObjective<S>,
        psi: CompositePart<S>,
        reference_point: Vector<S>,
    ) -> Self {
        assert_eq!(reference_point.len(), dim);
        Problem {
            f,
            psi,
            dim,
            optimum: None,
            metadata: InstanceMetadata::empty(),
            id: id.into(),
            reference_point,
            segment_minimizer: None,
        }
    }

    pub fn with_optimum(mut self, point: Vector<S>, value: S) -> Self {
        self.optimum = Some(Optimum { point, value });
        self
    }

    pub fn with_metadata(mut self, metadata: InstanceMetadata<S>) -> Self {
        self.metadata = metadata;
        self
    }

    /// Closed-form minimizer of `θ ↦ (f+Ψ)(x + θ(s-x))` over `[0,1]`, when
    /// the instance has one. The exact line search falls back to
    /// golden-section search otherwise.
    pub fn with_segment_minimizer(
        mut self,
        m: impl Fn(&[S], &[S]) -> S + Send + Sync + 'static,
    ) -> Self {
        self.segment_minimizer = Some(Box::new(m));
        self
    }

    pub fn segment_minimizer(&self, x: &[S], s: &[S]) -> Option<S> {
        self.segment_minimizer.as_ref().map(|m| m(x, s))
    }

    pub fn has_segment_minimizer(&self) -> bool {
        self.segment_minimizer.is_some()
    }

    pub fn check_dim(&self, x: &[S]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// Seeded sample of points in dom(Ψ): LMO images of random directions and
    /// convex combinations thereof. Works for any instance because the LMO
    /// maps into the domain by assumption.
    pub fn sample_domain(&self, count: usize, seed: u64) -> Vec<Vector<S>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut extreme: Vec<Vector<S>> = Vec::new();
        let mut points = Vec::with_capacity(count);
        while points.len() < count {
            let g: Vector<S> =
                (0..self.dim).map(|_| S::of(rng.gen_range(-1.0..1.0))).collect();
            let v = self.psi.lmo(&g);
            extreme.push(v.clone());
            if extreme.len() >= 2 && rng.gen_bool(0.7) {
                let a = &extreme[rng.gen_range(0..extreme.len())];
                let b = &extreme[rng.gen_range(0..extreme.len())];
                let t = S::of(rng.gen_range(0.0..1.0));
                points.push(linalg::convex_combine(a, b, t));
            } else {
                points.push(v);
            }
        }
        points
    }
}

/// `f(x) + Ψ(x)`, infinite iff `x` lies outside dom(Ψ).
pub fn primal_value<S: Real>(problem: &Problem<S>, x: &[S]) -> Result<Value<S>> {
    problem.check_dim(x)?;
    match problem.psi.value(x) {
        Value::Infinite => Ok(Value::Infinite),
        Value::Finite(psi) => Ok(Value::Finite(problem.f.value(x) + psi)),
    }
}

/// Tolerances used by [`validate_problem`].
#[derive(Debug, Clone, Copy)]
pub struct ValidationTolerances<S> {
    /// Max allowed relative discrepancy between the analytic directional
    /// derivative and a central finite difference.
    pub gradient: S,
    /// Max allowed LMO suboptimality against sampled comparison points.
    pub lmo: S,
}

impl<S: Real> Default for ValidationTolerances<S> {
    fn default() -> Self {
        ValidationTolerances { gradient: S::of(1e-5), lmo: S::of(1e-9) }
    }
}

/// Diagnostics from probing a problem definition.
#[derive(Debug, Clone)]
pub struct ValidationReport<S> {
    pub max_gradient_discrepancy: S,
    pub max_lmo_suboptimality: S,
    pub lmo_membership_failures: usize,
    pub probes: usize,
    pub pass: bool,
}

/// Probes the oracles for self-consistency: gradient vs central finite
/// differences at domain points, LMO optimality against sampled comparison
/// points, and domain membership of LMO outputs. Report-valued; a failing
/// report signals a broken problem definition, not an error in the caller.
pub fn validate_problem<S: Real>(
    problem: &Problem<S>,
    probes: usize,
    seed: u64,
) -> Result<ValidationReport<S>> {
    validate_problem_with(problem, probes, seed, ValidationTolerances::default())
}

pub fn validate_problem_with<S: Real>(
    problem: &Problem<S>,
    probes: usize,
    seed: u64,
    tol: ValidationTolerances<S>,
) -> Result<ValidationReport<S>> {
    if probes == 0 {
        return Err(Error::Usage("validate_problem requires probes >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let points = problem.sample_domain(probes, seed);

    let mut max_grad_disc = S::zero();
    for x in &points {
        let g = problem.f.gradient(x);
        let d: Vector<S> = {
            let raw: Vector<S> =
                (0..problem.dim).map(|_| S::of(rng.gen_range(-1.0..1.0))).collect();
            let n = norm2(&raw).max(S::of(1e-12));
            raw.iter().map(|&v| v / n).collect()
        };
        // Central differences with h = 1e-6 * (1 + ||x||).
        let h = S::of(1e-6) * (S::one() + norm2(x));
        let xp: Vector<S> = x.iter().zip(&d).map(|(&a, &b)| a + h * b).collect();
        let xm: Vector<S> = x.iter().zip(&d).map(|(&a, &b)| a - h * b).collect();
        let fd = (problem.f.value(&xp) - problem.f.value(&xm)) / (S::of(2.0) * h);
        let analytic = dot(&g, &d);
        let disc = (fd - analytic).abs() / (S::one() + analytic.abs());
        max_grad_disc = max_grad_disc.max(disc);
    }

    let mut max_lmo_subopt = S::zero();
    let mut membership_failures = 0usize;
    let comparisons = problem.sample_domain(probes, seed.wrapping_add(1));
    for _ in 0..probes {
        let g: Vector<S> = (0..problem.dim).map(|_| S::of(rng.gen_range(-1.0..1.0))).collect();
        let s = problem.psi.lmo(&g);
        if !problem.psi.contains(&s) {
            membership_failures += 1;
            continue;
        }
        let s_obj = match problem.psi.value(&s) {
            Value::Finite(psi) => dot(&g, &s) + psi,
            Value::Infinite => {
                membership_failures += 1;
                continue;
            }
        };
        for y in &comparisons {
            if let Value::Finite(psi_y) = problem.psi.value(y) {
                let y_obj = dot(&g, y) + psi_y;
                max_lmo_subopt = max_lmo_subopt.max(s_obj - y_obj);
            }
        }
    }

    let pass = max_grad_disc <= tol.gradient
        && max_lmo_subopt <= tol.lmo
        && membership_failures == 0;
    Ok(ValidationReport {
        max_gradient_discrepancy: max_grad_disc,
        max_lmo_suboptimality: max_lmo_subopt,
        lmo_membership_failures: membership_failures,
        probes,
        pass,
    })
}
