//! Instance library: quadratics over simplices and ℓp balls, a smooth plus
//! strongly convex composite, Hölder-gradient objectives, an error-bound
//! instance, and a local-scaling instance. Every LMO is closed-form and
//! deterministic (documented tie-breaks), and regularity constants are
//! recorded in the instance metadata.
//!
//! Set uniform-convexity constants μ are never taken from the literature;
//! they are measured by bisection over the membership test (see
//! [`measure_set_convexity_mu`]) and the measured value is what the metadata
//! carries.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{dot, norm2, norm_p, sub, Matrix};
use crate::model::{
    CompositePart, Convexity, ErrorBound, InstanceMetadata, LocalScaling, NormTag, Problem,
    SmoothObjective, Smoothness,
};
use crate::real::Real;
use crate::{Error, Result, Vector};

const MEMBERSHIP_SLACK: f64 = 1e-9;

/// Feasible sets the library knows how to test membership for, run an LMO on,
/// and measure uniform-convexity constants of.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SetDescriptor<S> {
    /// Standard simplex `{x ≥ 0, Σx = 1}`.
    Simplex,
    /// `{‖x‖_p ≤ radius}` with `p ≥ 2`.
    LpBall { p: S, radius: S },
}

impl<S: Real> SetDescriptor<S> {
    pub fn contains(&self, x: &[S]) -> bool {
        let slack = S::of(MEMBERSHIP_SLACK);
        match *self {
            SetDescriptor::Simplex => {
                let sum = x.iter().fold(S::zero(), |a, &v| a + v);
                x.iter().all(|&v| v >= -slack) && (sum - S::one()).abs() <= slack
            }
            SetDescriptor::LpBall { p, radius } => norm_p(x, p) <= radius + slack,
        }
    }

    /// `argmin_{y ∈ C} ⟨g, y⟩`. Tie-breaks: simplex picks the lowest index;
    /// the ball returns `-radius·e₁` at `g = 0`.
    pub fn lmo(&self, g: &[S]) -> Vector<S> {
        match *self {
            SetDescriptor::Simplex => {
                let mut best = 0;
                for (i, &v) in g.iter().enumerate() {
                    if v < g[best] {
                        best = i;
                    }
                }
                let mut s = vec![S::zero(); g.len()];
                s[best] = S::one();
                s
            }
            SetDescriptor::LpBall { p, radius } => lp_ball_lmo(g, p, radius),
        }
    }

    /// ℓ2 diameter of the set.
    pub fn diameter_l2(&self, n: usize) -> S {
        match *self {
            SetDescriptor::Simplex => S::of(2.0).sqrt(),
            SetDescriptor::LpBall { p, radius } => {
                // max ℓ2 norm on {‖x‖_p ≤ r} for p ≥ 2 is r·n^{1/2 - 1/p}
                let expo = S::of(0.5) - p.recip();
                S::of(2.0) * radius * S::of(n as f64).powf(expo)
            }
        }
    }
}

/// Hölder-extremal minimizer of `⟨g, ·⟩` over the ℓp ball:
/// `s_i = -r·sign(g_i)·|g_i|^{1/(p-1)} / ‖w‖_p`.
fn lp_ball_lmo<S: Real>(g: &[S], p: S, radius: S) -> Vector<S> {
    let expo = (p - S::one()).recip();
    let w: Vector<S> = g.iter().map(|&v| v.signum() * v.abs().powf(expo)).collect();
    let nw = norm_p(&w, p);
    if nw < S::of(1e-300) {
        let mut s = vec![S::zero(); g.len()];
        s[0] = -radius;
        return s;
    }
    w.iter().map(|&v| -radius * v / nw).collect()
}

/// `f(x) = ½xᵀQx + cᵀx` over the standard simplex, with a seeded symmetric
/// positive-semidefinite `Q` whose spectrum lies in `[0,1]` with `λ_max = 1`,
/// and a seeded linear term.
pub fn quadratic_over_simplex<S: Real>(n: usize, seed: u64) -> Result<Problem<S>> {
    if n < 2 {
        return Err(Error::Usage("quadratic_over_simplex requires n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = random_orthogonal::<S>(n, &mut rng);
    let mut eig = vec![S::one()];
    for _ in 1..n {
        eig.push(S::of(rng.gen_range(0.0..1.0)));
    }
    // Q = Vᵀ·diag(eig)·V
    let q = Matrix::from_fn(n, |i, j| {
        (0..n).fold(S::zero(), |acc, k| acc + v.get(k, i) * eig[k] * v.get(k, j))
    });
    let c: Vector<S> = (0..n).map(|_| S::of(rng.gen_range(-1.0..1.0))).collect();
    quadratic_over_simplex_with(q, c, &format!("quadratic_over_simplex(n={n},seed={seed})"))
}

/// The same instance shape with an explicit `(Q, c)`. `Q` must be symmetric
/// positive semidefinite with `λ_max ≤ 1` for the recorded `L = 1` to hold.
pub fn quadratic_over_simplex_with<S: Real>(
    q: Matrix<S>,
    c: Vector<S>,
    id: &str,
) -> Result<Problem<S>> {
    let n = q.dim();
    if n != c.len() {
        return Err(Error::DimensionMismatch { expected: n, got: c.len() });
    }
    let q = Arc::new(q);
    let set = SetDescriptor::Simplex;

    let qv = Arc::clone(&q);
    let cv = c.clone();
    let f = SmoothObjective::new(
        move |x: &[S]| {
            let qx = qv.matvec(x);
            S::of(0.5) * dot(x, &qx) + dot(&cv, x)
        },
        {
            let qg = Arc::clone(&q);
            let cg = c.clone();
            move |x: &[S]| {
                let mut g = qg.matvec(x);
                for (gi, ci) in g.iter_mut().zip(&cg) {
                    *gi = *gi + *ci;
                }
                g
            }
        },
    );
    let psi = CompositePart::indicator(move |x: &[S]| set.contains(x), move |g: &[S]| set.lmo(g));

    let mut reference = vec![S::of(1.0 / n as f64); n];
    reference[0] = S::one() - reference.iter().skip(1).fold(S::zero(), |a, &v| a + v);

    let qm = Arc::clone(&q);
    let cm = c.clone();
    let mut meta = InstanceMetadata::empty();
    meta.smoothness = Some(Smoothness { q: S::of(2.0), l: S::one(), norm: NormTag::L2 });
    meta.diameter = Some(S::of(2.0).sqrt());

    Ok(Problem::new(id, n, f, psi, reference)
        .with_metadata(meta)
        .with_segment_minimizer(move |x: &[S], s: &[S]| {
            let d = sub(s, x);
            let mut g = qm.matvec(x);
            for (gi, ci) in g.iter_mut().zip(&cm) {
                *gi = *gi + *ci;
            }
            let num = -dot(&g, &d);
            let den = dot(&d, &qm.matvec(&d));
            segment_quadratic_argmin(num, den)
        }))
}

/// Toy used throughout the tests: `f(x) = ½‖x - e₁‖²` over the simplex, with
/// optimum `e₁` and optimal value 0.
pub fn simplex_toy<S: Real>(n: usize) -> Problem<S> {
    let mut target = vec![S::zero(); n];
    target[0] = S::one();
    let set = SetDescriptor::Simplex;
    let t = target.clone();
    let f = SmoothObjective::new(
        move |x: &[S]| {
            let d = sub(x, &t);
            S::of(0.5) * dot(&d, &d)
        },
        {
            let t = target.clone();
            move |x: &[S]| sub(x, &t)
        },
    );
    let psi = CompositePart::indicator(move |x: &[S]| set.contains(x), move |g: &[S]| set.lmo(g));
    let reference = vec![S::of(1.0 / n as f64); n];
    let mut meta = InstanceMetadata::empty();
    meta.smoothness = Some(Smoothness { q: S::of(2.0), l: S::one(), norm: NormTag::L2 });
    meta.diameter = Some(S::of(2.0).sqrt());
    let tm = target.clone();
    Problem::new(format!("simplex_toy(n={n})"), n, f, psi, reference)
        .with_metadata(meta)
        .with_optimum(target, S::zero())
        .with_segment_minimizer(move |x: &[S], s: &[S]| {
            let d = sub(s, x);
            let num = -dot(&sub(x, &tm), &d);
            segment_quadratic_argmin(num, dot(&d, &d))
        })
}

/// `f(x) = ½‖x - c‖²` over `{‖x‖_p ≤ radius}` with `p ≥ 2`. When
/// `‖c‖₂ > radius` the gradient is bounded away from zero on the ball and the
/// metadata records `ℓ = ‖c‖₂ - radius` along with the measured set-convexity
/// constant, plus the known optimum (the ℓ2 case projects `c` onto the ball).
pub fn quadratic_over_lp_ball<S: Real>(
    n: usize,
    p: S,
    radius: S,
    c: &[S],
    seed: u64,
) -> Result<Problem<S>> {
    if n == 0 {
        return Err(Error::Usage("quadratic_over_lp_ball requires n >= 1".into()));
    }
    if radius <= S::zero() {
        return Err(Error::Usage("quadratic_over_lp_ball requires radius > 0".into()));
    }
    if p < S::of(2.0) {
        return Err(Error::Usage("quadratic_over_lp_ball requires p >= 2".into()));
    }
    if c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: c.len() });
    }
    let set = SetDescriptor::LpBall { p, radius };
    let center = c.to_vec();
    let cf = center.clone();
    let f = SmoothObjective::new(
        move |x: &[S]| {
            let d = sub(x, &cf);
            S::of(0.5) * dot(&d, &d)
        },
        {
            let cg = center.clone();
            move |x: &[S]| sub(x, &cg)
        },
    );
    let psi = CompositePart::indicator(move |x: &[S]| set.contains(x), move |g: &[S]| set.lmo(g));

    let mut meta = InstanceMetadata::empty();
    meta.smoothness = Some(Smoothness { q: S::of(2.0), l: S::one(), norm: NormTag::L2 });
    meta.diameter = Some(set.diameter_l2(n));
    let norm_c = norm2(c);
    if norm_c > radius {
        meta.grad_lower_bound = Some(norm_c - radius);
    }
    let mu = measure_set_convexity_mu(&set, n, 64, seed)?;
    meta.convexity = Some(Convexity { p, mu, norm: NormTag::L2, of_set: true });

    let id = format!(
        "quadratic_over_lp_ball(n={n},p={p},r={radius},|c|={norm_c:.6},seed={seed})"
    );
    let cm = center.clone();
    let mut problem = Problem::new(id, n, f, psi, vec![S::zero(); n])
        .with_metadata(meta)
        .with_segment_minimizer(move |x: &[S], s: &[S]| {
            let d = sub(s, x);
            let num = -dot(&sub(x, &cm), &d);
            segment_quadratic_argmin(num, dot(&d, &d))
        });
    if p == S::of(2.0) && norm_c > radius {
        let opt: Vector<S> = center.iter().map(|&v| v * radius / norm_c).collect();
        let value = S::of(0.5) * (norm_c - radius) * (norm_c - radius);
        problem = problem.with_optimum(opt, value);
    }
    Ok(problem)
}

/// `f(x) = ½‖x - c‖²` with a seeded center, `Ψ(x) = (μ/2)‖x‖²`. The LMO is
/// `s = -g/μ` and the optimum is `c/(1+μ)`.
pub fn smooth_plus_strongly_convex<S: Real>(n: usize, mu: S, seed: u64) -> Result<Problem<S>> {
    if n == 0 {
        return Err(Error::Usage("smooth_plus_strongly_convex requires n >= 1".into()));
    }
    if mu <= S::zero() {
        return Err(Error::Usage("smooth_plus_strongly_convex requires μ > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vector<S> = (0..n).map(|_| S::of(rng.gen_range(-2.0..2.0))).collect();
    Ok(smooth_plus_strongly_convex_with_center(n, mu, c))
}

/// The same instance with an explicit center.
pub fn smooth_plus_strongly_convex_with_center<S: Real>(
    n: usize,
    mu: S,
    c: Vector<S>,
) -> Problem<S> {
    assert_eq!(c.len(), n);
    assert!(mu > S::zero());
    let cf = c.clone();
    let f = SmoothObjective::new(
        move |x: &[S]| {
            let d = sub(x, &cf);
            S::of(0.5) * dot(&d, &d)
        },
        {
            let cg = c.clone();
            move |x: &[S]| sub(x, &cg)
        },
    );
    let half_mu = S::of(0.5) * mu;
    let psi = CompositePart::new(
        move |x: &[S]| crate::model::Value::Finite(half_mu * dot(x, x)),
        move |g: &[S]| g.iter().map(|&v| -v / mu).collect(),
        |_x: &[S]| true,
        false,
    );
    let norm_c = norm2(&c);
    // optimal value μ‖c‖²/(2(1+μ)) at x⋆ = c/(1+μ)
    let opt: Vector<S> = c.iter().map(|&v| v / (S::one() + mu)).collect();
    let opt_value = mu * norm_c * norm_c / (S::of(2.0) * (S::one() + mu));

    let mut meta = InstanceMetadata::empty();
    meta.smoothness = Some(Smoothness { q: S::of(2.0), l: S::one(), norm: NormTag::L2 });
    meta.convexity = Some(Convexity { p: S::of(2.0), mu, norm: NormTag::L2, of_set: false });

    let cm = c.clone();
    Problem::new(
        format!("smooth_plus_strongly_convex(n={n},mu={mu},|c|={norm_c:.6})"),
        n,
        f,
        psi,
        vec![S::zero(); n],
    )
    .with_metadata(meta)
    .with_optimum(opt, opt_value)
    .with_segment_minimizer(move |x: &[S], s: &[S]| {
        // minimize ½‖x+θd-c‖² + (μ/2)‖x+θd‖²
        let d = sub(s, x);
        let num = -(dot(&d, &sub(x, &cm)) + mu * dot(&d, x));
        segment_quadratic_argmin(num, (S::one() + mu) * dot(&d, &d))
    })
}

/// `f(x) = (1/(1+ν))·‖x - c‖₂^{1+ν}` over the given set, ν ∈ (0,1]. The
/// gradient is `‖x-c‖^{ν-1}(x-c)`, zero at `x = c`. Smoothness metadata uses
/// the analytic candidate `L = 2^{1-ν}` with exponent `q = 1+ν`.
pub fn holder_objective_over_set<S: Real>(
    n: usize,
    nu: S,
    set: SetDescriptor<S>,
    shift: &[S],
    seed: u64,
) -> Result<Problem<S>> {
    if nu <= S::zero() || nu > S::one() {
        return Err(Error::Usage("holder_objective_over_set requires ν in (0,1]".into()));
    }
    if shift.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: shift.len() });
    }
    let c = shift.to_vec();
    let cf = c.clone();
    let f = SmoothObjective::new(
        move |x: &[S]| {
            let d = sub(x, &cf);
            norm2(&d).powf(S::one() + nu) / (S::one() + nu)
        },
        {
            let cg = c.clone();
            move |x: &[S]| {
                let d = sub(x, &cg);
                let r = norm2(&d);
                if r == S::zero() {
                    vec![S::zero(); x.len()]
                } else {
                    let scale = r.powf(nu - S::one());
                    d.iter().map(|&v| v * scale).collect()
                }
            }
        },
    );
    let psi =
        CompositePart::indicator(move |x: &[S]| set.contains(x), move |g: &[S]| set.lmo(g));

    let mut meta = InstanceMetadata::empty();
    let q = S::one() + nu;
    meta.smoothness = Some(Smoothness {
        q,
        l: S::of(2.0).powf(S::one() - nu),
        norm: NormTag::L2,
    });
    meta.diameter = Some(set.diameter_l2(n));
    if let SetDescriptor::LpBall { p, radius } = set {
        let norm_c = norm2(&c);
        if norm_c > radius {
            // ‖∇f‖ = ‖x-c‖^ν ≥ (‖c‖-r)^ν on the ball
            meta.grad_lower_bound = Some((norm_c - radius).powf(nu));
        }
        let mu = measure_set_convexity_mu(&set, n, 64, seed)?;
        meta.convexity = Some(Convexity { p, mu, norm: NormTag::L2, of_set: true });
    }

    let reference = match set {
        SetDescriptor::Simplex => vec![S::of(1.0 / n as f64); n],
        SetDescriptor::LpBall { .. } => vec![S::zero(); n],
    };
    let cm = c.clone();
    Ok(Problem::new(
        format!("holder_objective_over_set(n={n},nu={nu},seed={seed})"),
        n,
        f,
        psi,
        reference,
    )
    .with_metadata(meta)
    .with_segment_minimizer(move |x: &[S], s: &[S]| {
        // f is increasing in ‖x+θd-c‖, so minimize the quadratic distance
        let d = sub(s, x);
        let num = -dot(&sub(x, &cm), &d);
        segment_quadratic_argmin(num, dot(&d, &d))
    }))
}

/// `f(x) = ‖x‖₂²` over the unit ℓ2 ball: the optimum `0` is interior, the
/// Hölderian error bound `dist(x, X⋆) = (f - f⋆)^{1/2}` holds with exact
/// equality (γ = ½, K = 1).
pub fn error_bound_instance<S: Real>(n: usize) -> Problem<S> {
    assert!(n >= 1);
    let set = SetDescriptor::LpBall { p: S::of(2.0), radius: S::one() };
    let f = SmoothObjective::new(
        |x: &[S]| dot(x, x),
        |x: &[S]| x.iter().map(|&v| v + v).collect(),
    );
    let psi = CompositePart::indicator(move |x: &[S]| set.contains(x), move |g: &[S]| set.lmo(g));

    let mut meta = InstanceMetadata::empty();
    meta.smoothness = Some(Smoothness { q: S::of(2.0), l: S::of(2.0), norm: NormTag::L2 });
    meta.diameter = Some(S::of(2.0));
    meta.error_bound = Some(ErrorBound { gamma: S::of(0.5), k: S::one(), norm: NormTag::L2 });
    let mu = measure_set_convexity_mu(&set, n, 64, 0).expect("ball convexity measurement");
    meta.convexity = Some(Convexity { p: S::of(2.0), mu, norm: NormTag::L2, of_set: true });

    Problem::new(format!("error_bound_instance(n={n})"), n, f, psi, vec![S::zero(); n])
        .with_metadata(meta)
        .with_optimum(vec![S::zero(); n], S::zero())
        .with_segment_minimizer(|x: &[S], s: &[S]| {
            let d = sub(s, x);
            segment_quadratic_argmin(-dot(x, &d), dot(&d, &d))
        })
}

/// `f(x) = ½‖x - 2e₁‖²` over the unit ℓ2 ball: optimum `e₁` on the boundary,
/// with the local scaling inequality `⟨∇f(x⋆), x - x⋆⟩ = 1 - x₁ ≥ ½‖x-x⋆‖²`
/// holding with σ = ½ (tight at the antipode).
pub fn local_scaling_instance<S: Real>(n: usize) -> Result<Problem<S>> {
    if n < 2 {
        return Err(Error::Usage("local_scaling_instance requires n >= 2".into()));
    }
    let mut center = vec![S::zero(); n];
    center[0] = S::of(2.0);
    let mut problem = quadratic_over_lp_ball(n, S::of(2.0), S::one(), &center, 0)?;
    problem.id = format!("local_scaling_instance(n={n})");
    problem.metadata.local_scaling = Some(LocalScaling {
        sigma: S::of(0.5),
        nu: S::one(),
        p: S::of(2.0),
        norm: NormTag::L2,
    });
    Ok(problem)
}

/// Clamped unconstrained minimizer `num/den` of a convex quadratic
/// `θ ↦ -num·θ + ½den·θ²` over `[0,1]`. A degenerate `den` means the
/// objective is linear in `θ`, so the sign of `num` decides the endpoint.
fn segment_quadratic_argmin<S: Real>(num: S, den: S) -> S {
    if den <= S::of(1e-300) {
        return if num > S::zero() { S::one() } else { S::zero() };
    }
    (num / den).max(S::zero()).min(S::one())
}

/// Random orthogonal matrix: Gram-Schmidt applied to a seeded Gaussian-ish
/// matrix (sums of uniforms are fine for this purpose).
fn random_orthogonal<S: Real>(n: usize, rng: &mut ChaCha8Rng) -> Matrix<S> {
    loop {
        let mut rows: Vec<Vector<S>> = (0..n)
            .map(|_| (0..n).map(|_| S::of(rng.gen_range(-1.0..1.0))).collect())
            .collect();
        let mut ok = true;
        for i in 0..n {
            for j in 0..i {
                let proj = dot(&rows[i], &rows[j]);
                let (head, tail) = rows.split_at_mut(i);
                for (v, &w) in tail[0].iter_mut().zip(&head[j]) {
                    *v = *v - proj * w;
                }
            }
            let norm = norm2(&rows[i]);
            if norm < S::of(1e-6) {
                ok = false;
                break;
            }
            for v in rows[i].iter_mut() {
                *v = *v / norm;
            }
        }
        if ok {
            return Matrix::from_rows(rows);
        }
    }
}

/// Checks the set uniform-convexity inequality by sampling: for chords
/// `(x, y)`, interpolation weights θ, and unit directions z, tests whether
/// `x_θ + θ(1-θ)(μ/p)·‖y-x‖₂^p·z` stays in the set. Returns whether all
/// samples passed and the worst boundary excess observed.
pub fn verify_set_uniform_convexity<S: Real>(
    set: &SetDescriptor<S>,
    n: usize,
    p: S,
    mu: S,
    samples: usize,
    seed: u64,
) -> (bool, S) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = S::zero();
    for (x, y, theta, z) in convexity_samples(set, n, samples, &mut rng) {
        let shift = theta * (S::one() - theta) * (mu / p) * norm2(&sub(&y, &x)).powf(p);
        let point: Vector<S> = x
            .iter()
            .zip(&y)
            .zip(&z)
            .map(|((&a, &b), &zi)| (S::one() - theta) * a + theta * b + shift * zi)
            .collect();
        worst = worst.max(boundary_excess(set, &point));
    }
    (worst <= S::of(MEMBERSHIP_SLACK), worst)
}

/// Largest μ (after a 0.999 safety shrink) for which every sampled chord
/// keeps its perturbed point inside the set for *every* unit direction z:
/// per chord, the admissible shift is bounded by the norm slack
/// `r - ‖x_θ‖_p`, which lower-bounds the clearance in any ℓ2 direction
/// because `‖·‖_p ≤ ‖·‖₂` for p ≥ 2. Structured samples (axis-aligned and
/// diagonal short chords, antipodes) cover the flattest parts of ℓp-ball
/// boundaries.
pub fn measure_set_convexity_mu<S: Real>(
    set: &SetDescriptor<S>,
    n: usize,
    random_samples: usize,
    seed: u64,
) -> Result<S> {
    let p = match *set {
        SetDescriptor::LpBall { p, .. } => p,
        SetDescriptor::Simplex => {
            return Err(Error::Usage(
                "the simplex has flat faces and no positive uniform-convexity constant".into(),
            ))
        }
    };
    let radius = match *set {
        SetDescriptor::LpBall { radius, .. } => radius,
        SetDescriptor::Simplex => unreachable!(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = S::infinity();
    for (x, y, theta, _z) in convexity_samples(set, n, random_samples, &mut rng) {
        let chord = norm2(&sub(&y, &x));
        if chord < S::of(1e-8) {
            continue;
        }
        let base: Vector<S> = x
            .iter()
            .zip(&y)
            .map(|(&a, &b)| (S::one() - theta) * a + theta * b)
            .collect();
        let tau = (radius - norm_p(&base, p)).max(S::zero());
        let mu = tau * p / (theta * (S::one() - theta) * chord.powf(p));
        best = best.min(mu);
    }
    if !best.is_finite() {
        return Err(Error::DegenerateInput(
            "no usable chord samples for convexity measurement".into(),
        ));
    }
    Ok(best * S::of(0.999))
}

fn boundary_excess<S: Real>(set: &SetDescriptor<S>, x: &[S]) -> S {
    match *set {
        SetDescriptor::LpBall { p, radius } => norm_p(x, p) - radius,
        SetDescriptor::Simplex => {
            let sum = x.iter().fold(S::zero(), |a, &v| a + v);
            let neg = x.iter().fold(S::zero(), |a, &v| a.max(-v));
            neg.max((sum - S::one()).abs())
        }
    }
}

/// Chord samples `(x, y, θ, z)` with boundary endpoints and outward unit
/// perturbation directions. Mixes structured chords (antipodes; short chords
/// centered on axis and diagonal boundary points, where ℓp balls are
/// flattest) with random boundary chords.
fn convexity_samples<S: Real>(
    set: &SetDescriptor<S>,
    n: usize,
    random_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(Vector<S>, Vector<S>, S, Vector<S>)> {
    type Sample<S> = (Vec<S>, Vec<S>, S, Vec<S>);
    let radius = match *set {
        SetDescriptor::LpBall { radius, .. } => radius,
        SetDescriptor::Simplex => S::one(),
    };
    let p = match *set {
        SetDescriptor::LpBall { p, .. } => p,
        SetDescriptor::Simplex => S::of(2.0),
    };
    let thetas = [0.1, 0.25, 0.5, 0.75, 0.9];
    let mut out: Vec<Sample<S>> = Vec::new();

    let push_chord = |x: Vector<S>, y: Vector<S>, out: &mut Vec<Sample<S>>| {
        let mid: Vector<S> =
            x.iter().zip(&y).map(|(&a, &b)| (a + b) * S::of(0.5)).collect();
        let z = outward_direction(set, &mid, &sub(&y, &x));
        for &t in &thetas {
            out.push((x.clone(), y.clone(), S::of(t), z.clone()));
        }
    };

    // antipodal and cross-axis chords
    let axis = |i: usize, sign: f64| {
        let mut v = vec![S::zero(); n];
        v[i] = S::of(sign) * radius;
        v
    };
    push_chord(axis(0, 1.0), axis(0, -1.0), &mut out);
    if n >= 2 {
        push_chord(axis(0, 1.0), axis(1, 1.0), &mut out);
        push_chord(axis(0, 1.0), axis(1, -1.0), &mut out);
    }

    // short chords centered at an axis point (flattest spot for p > 2)
    if n >= 2 {
        for &t in &[1e-2, 3e-2, 0.1, 0.3, 1.0] {
            let half = S::of(t) * radius;
            if half >= radius {
                push_chord(axis(1, 1.0), axis(1, -1.0), &mut out);
                continue;
            }
            let a0 = radius * (S::one() - (half / radius).powf(p)).powf(p.recip());
            let mut x = vec![S::zero(); n];
            x[0] = a0;
            x[1] = half;
            let mut y = vec![S::zero(); n];
            y[0] = a0;
            y[1] = -half;
            push_chord(x, y, &mut out);
        }
        // transverse diagonal chords at an axis point: for p > 2 these are
        // the flattest chords (the ℓp norm of the chord direction is
        // smallest relative to ℓ2), and they attain the infimum of the
        // per-chord constant
        for &t in &[1e-2, 3e-2, 0.1, 0.3] {
            let half = S::of(t) * radius;
            let w_scale = (S::of((n - 1) as f64)).sqrt().recip();
            let mut x = vec![half * w_scale; n];
            let mut y = vec![-half * w_scale; n];
            x[0] = S::one();
            y[0] = S::one();
            let (x, y) = match *set {
                SetDescriptor::LpBall { p, radius } => {
                    let nx = norm_p(&x, p);
                    let ny = norm_p(&y, p);
                    (
                        x.iter().map(|&v| v * radius / nx).collect::<Vector<S>>(),
                        y.iter().map(|&v| v * radius / ny).collect::<Vector<S>>(),
                    )
                }
                SetDescriptor::Simplex => (x, y),
            };
            push_chord(x, y, &mut out);
        }

        // short chords centered at the diagonal boundary point
        let diag_coord = radius / S::of(n as f64).powf(p.recip());
        for &t in &[1e-2, 0.1, 0.3] {
            let half = S::of(t) * radius;
            let d: Vector<S> = vec![diag_coord; n];
            let mut dir = vec![S::zero(); n];
            dir[0] = S::one();
            dir[1] = -S::one();
            let dir_n = norm2(&dir);
            let x: Vector<S> = d
                .iter()
                .zip(&dir)
                .map(|(&a, &b)| a + half * b / dir_n)
                .collect();
            let y: Vector<S> = d
                .iter()
                .zip(&dir)
                .map(|(&a, &b)| a - half * b / dir_n)
                .collect();
            // project endpoints back onto the boundary
            let (x, y) = match *set {
                SetDescriptor::LpBall { p, radius } => {
                    let nx = norm_p(&x, p);
                    let ny = norm_p(&y, p);
                    (
                        x.iter().map(|&v| v * radius / nx).collect(),
                        y.iter().map(|&v| v * radius / ny).collect(),
                    )
                }
                SetDescriptor::Simplex => (x, y),
            };
            push_chord(x, y, &mut out);
        }
    }

    // random boundary chords
    for _ in 0..random_samples {
        let raw_x: Vector<S> = (0..n).map(|_| S::of(rng.gen_range(-1.0..1.0))).collect();
        let raw_y: Vector<S> = (0..n).map(|_| S::of(rng.gen_range(-1.0..1.0))).collect();
        let (x, y) = match *set {
            SetDescriptor::LpBall { p, radius } => {
                let nx = norm_p(&raw_x, p).max(S::of(1e-12));
                let ny = norm_p(&raw_y, p).max(S::of(1e-12));
                (
                    raw_x.iter().map(|&v| v * radius / nx).collect::<Vector<S>>(),
                    raw_y.iter().map(|&v| v * radius / ny).collect::<Vector<S>>(),
                )
            }
            SetDescriptor::Simplex => {
                let to_simplex = |v: &[S]| {
                    let abs: Vector<S> = v.iter().map(|&w| w.abs() + S::of(1e-9)).collect();
                    let sum = abs.iter().fold(S::zero(), |a, &w| a + w);
                    abs.iter().map(|&w| w / sum).collect::<Vector<S>>()
                };
                (to_simplex(&raw_x), to_simplex(&raw_y))
            }
        };
        push_chord(x, y, &mut out);
    }
    out
}

/// Unit (ℓ2) direction orthogonal to the chord, oriented outward from the
/// set's center when the base point allows it.
fn outward_direction<S: Real>(set: &SetDescriptor<S>, base: &[S], chord: &[S]) -> Vector<S> {
    let n = base.len();
    // start from the boundary normal at (the projection of) the base point
    let mut z: Vector<S> = match *set {
        SetDescriptor::LpBall { p, .. } => {
            let nb = norm2(base);
            if nb > S::of(1e-8) {
                base.iter()
                    .map(|&v| v.signum() * v.abs().powf(p - S::one()))
                    .collect()
            } else {
                let mut e = vec![S::zero(); n];
                e[0] = S::one();
                e
            }
        }
        SetDescriptor::Simplex => vec![S::of((n as f64).sqrt().recip()); n],
    };
    // orthogonalize against the chord so the perturbation tests curvature,
    // not chord-parallel slack
    let cn = norm2(chord);
    if cn > S::of(1e-12) {
        let proj = dot(&z, chord) / (cn * cn);
        for (zi, &ci) in z.iter_mut().zip(chord) {
            *zi = *zi - proj * ci;
        }
    }
    let zn = norm2(&z);
    if zn < S::of(1e-10) {
        // chord parallel to the normal; pick any orthogonal axis
        let mut e = vec![S::zero(); n];
        let k = chord
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        e[k] = S::one();
        let proj = dot(&e, chord) / (cn * cn).max(S::of(1e-300));
        for (ei, &ci) in e.iter_mut().zip(chord) {
            *ei = *ei - proj * ci;
        }
        let en = norm2(&e).max(S::of(1e-300));
        return e.iter().map(|&v| v / en).collect();
    }
    z.iter().map(|&v| v / zn).collect()
}
