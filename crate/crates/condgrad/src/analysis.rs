//! Growth certificates, curvature constants, per-iteration convergence
//! envelopes, certificate checking against observed trajectories, and the
//! Borwein-Li-Yao sequence bound.
//!
//! Envelopes are produced by iterating the one-step recurrence map rather
//! than by closed forms: the closed forms' regime-switch index is defined
//! through the observed sequence, which an a-priori envelope cannot know. The
//! map is nondecreasing in its argument, so the iterated sequence dominates
//! every sequence satisfying the recurrence. The closed forms are still
//! evaluated as internal cross-checks.

use crate::gap::{curve_gap, StepContext};
use crate::model::{InstanceMetadata, Problem};
use crate::real::Real;
use crate::solver::Trajectory;
use crate::stepsize::StepsizeStrategy;
use crate::{Error, Result, Vector};

/// Which growth inequality a certificate asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthKind {
    /// `D(x,s,θ) ≤ (M/q)·θ^q·gap(x,g)^r` everywhere.
    Growth,
    /// `D(x,s,θ)·subopt(x)^{1-r} ≤ (M/q)·θ^q·gap(x,g)`.
    WeakGrowth,
    /// The growth inequality required only where `gap(x,g) < ε`.
    LocalGrowth,
}

/// Named constant-derivation cases for [`theoretical_growth_constant`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthCase {
    /// Smooth `f`, bounded domain: `(q, 0)` with `M = L·diam^q`.
    SmoothBounded,
    /// Uniformly convex Ψ: `(q, q/p)` with `M = L·(p/μ)^{q/p}`.
    UniformlyConvexPsi,
    /// Uniformly convex feasible set, gradient bounded below:
    /// `(q, q/p)` with `M = L·(p/(ℓμ))^{q/p}`.
    UniformlyConvexSet,
    /// Hölderian error bound (weak growth): `(q, γq/p)` with
    /// `M = L·(pK/μ)^{q/p}`.
    ErrorBound,
    /// Local scaling at the optimum (local growth): `q = 1+ν`,
    /// `r = q(q-1)/(p(p-1))`, `ε = 1`.
    LocalScaling,
}

#[derive(Debug, Clone)]
pub enum Provenance {
    Theoretical(GrowthCase),
    Empirical { samples: usize, theta_grid: usize },
}

#[derive(Debug, Clone)]
pub struct GrowthCertificate<S> {
    pub kind: GrowthKind,
    pub q: S,
    pub r: S,
    pub m: S,
    /// Locality threshold; present iff `kind` is `LocalGrowth`.
    pub epsilon: Option<S>,
    pub provenance: Provenance,
}

impl<S: Real> GrowthCertificate<S> {
    fn validate(&self) -> Result<()> {
        if self.q <= S::one() {
            return Err(Error::Usage(format!("certificate requires q > 1, got {}", self.q)));
        }
        if self.r < S::zero() || self.r > S::one() {
            return Err(Error::Usage(format!("certificate requires r in [0,1], got {}", self.r)));
        }
        if self.m <= S::zero() {
            return Err(Error::Usage(format!("certificate requires M > 0, got {}", self.m)));
        }
        match (self.kind, self.epsilon) {
            (GrowthKind::LocalGrowth, None) => {
                Err(Error::Usage("local-growth certificate requires ε".into()))
            }
            (GrowthKind::LocalGrowth, Some(e)) if e <= S::zero() => {
                Err(Error::Usage("local-growth ε must be positive".into()))
            }
            (k, Some(_)) if k != GrowthKind::LocalGrowth => {
                Err(Error::Usage("ε is only meaningful for local-growth certificates".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Derives a growth certificate from recorded instance metadata by the
/// closed-form constant for the chosen case. Errors name the missing metadata
/// field when the instance does not carry what the case needs.
pub fn theoretical_growth_constant<S: Real>(
    meta: &InstanceMetadata<S>,
    case: GrowthCase,
) -> Result<GrowthCertificate<S>> {
    let smooth = meta.smoothness.as_ref().ok_or(Error::MissingMetadata("smoothness"))?;
    let (q, l) = (smooth.q, smooth.l);
    let cert = match case {
        GrowthCase::SmoothBounded => {
            let diam = meta.diameter.ok_or(Error::MissingMetadata("diameter"))?;
            GrowthCertificate {
                kind: GrowthKind::Growth,
                q,
                r: S::zero(),
                m: l * diam.powf(q),
                epsilon: None,
                provenance: Provenance::Theoretical(case),
            }
        }
        GrowthCase::UniformlyConvexPsi => {
            let conv = meta.convexity.ok_or(Error::MissingMetadata("convexity"))?;
            if conv.of_set {
                return Err(Error::Usage(
                    "UniformlyConvexPsi needs function convexity, but metadata records set \
                     convexity"
                        .into(),
                ));
            }
            GrowthCertificate {
                kind: GrowthKind::Growth,
                q,
                r: q / conv.p,
                m: l * (conv.p / conv.mu).powf(q / conv.p),
                epsilon: None,
                provenance: Provenance::Theoretical(case),
            }
        }
        GrowthCase::UniformlyConvexSet => {
            let conv = meta.convexity.ok_or(Error::MissingMetadata("convexity"))?;
            if !conv.of_set {
                return Err(Error::Usage(
                    "UniformlyConvexSet needs set convexity, but metadata records function \
                     convexity"
                        .into(),
                ));
            }
            let ell = meta.grad_lower_bound.ok_or(Error::MissingMetadata("grad_lower_bound"))?;
            GrowthCertificate {
                kind: GrowthKind::Growth,
                q,
                r: q / conv.p,
                m: l * (conv.p / (ell * conv.mu)).powf(q / conv.p),
                epsilon: None,
                provenance: Provenance::Theoretical(case),
            }
        }
        GrowthCase::ErrorBound => {
            let conv = meta.convexity.ok_or(Error::MissingMetadata("convexity"))?;
            let eb = meta.error_bound.ok_or(Error::MissingMetadata("error_bound"))?;
            GrowthCertificate {
                kind: GrowthKind::WeakGrowth,
                q,
                r: eb.gamma * q / conv.p,
                m: l * (conv.p * eb.k / conv.mu).powf(q / conv.p),
                epsilon: None,
                provenance: Provenance::Theoretical(case),
            }
        }
        GrowthCase::LocalScaling => {
            let ls = meta.local_scaling.ok_or(Error::MissingMetadata("local_scaling"))?;
            let one = S::one();
            let q_loc = one + ls.nu;
            let r = q_loc * (q_loc - one) / (ls.p * (ls.p - one));
            // M = L·(σ^{-1/p} + σ^{-ν/(p(p-1))}·(L/σ)^{1/(p-1)})^{1+ν}
            let term = ls.sigma.powf(-ls.p.recip())
                + ls.sigma.powf(-ls.nu / (ls.p * (ls.p - one)))
                    * (l / ls.sigma).powf((ls.p - one).recip());
            GrowthCertificate {
                kind: GrowthKind::LocalGrowth,
                q: q_loc,
                r,
                m: l * term.powf(q_loc),
                epsilon: Some(S::one()),
                provenance: Provenance::Theoretical(case),
            }
        }
    };
    cert.validate()?;
    Ok(cert)
}

/// Which empirical ratio to supremize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EmpiricalKind<S> {
    Growth,
    WeakGrowth,
    LocalGrowth { epsilon: S },
}

/// Estimates the smallest growth constant consistent with samples: the
/// supremum of the defining ratio over sample points and a θ grid. Samples
/// with `gap ≤ 1e-14` (and, for the local kind, `gap ≥ ε`) are skipped; an
/// empirical estimate lower-bounds any valid `M`.
pub fn empirical_growth_constant<S: Real>(
    problem: &Problem<S>,
    kind: EmpiricalKind<S>,
    q: S,
    r: S,
    samples: &[Vector<S>],
    theta_grid: usize,
) -> Result<GrowthCertificate<S>> {
    if theta_grid < 2 {
        return Err(Error::Usage("empirical_growth_constant requires θ-grid >= 2".into()));
    }
    let opt_value = match kind {
        EmpiricalKind::WeakGrowth => Some(
            problem
                .optimum
                .as_ref()
                .ok_or(Error::MissingMetadata("optimum"))?
                .value,
        ),
        _ => None,
    };
    let mut best: Option<S> = None;
    for x in samples {
        let ctx = StepContext::evaluate(problem, x)?;
        if ctx.wolfe_gap <= S::of(1e-14) {
            continue;
        }
        if let EmpiricalKind::LocalGrowth { epsilon } = kind {
            if ctx.wolfe_gap >= epsilon {
                continue;
            }
        }
        for j in 1..=theta_grid {
            let theta = S::of(j as f64) / S::of(theta_grid as f64);
            let d = curve_gap(problem, &ctx.x, &ctx.s, theta)?;
            let ratio = match kind {
                EmpiricalKind::Growth | EmpiricalKind::LocalGrowth { .. } => {
                    q * d / (theta.powf(q) * pow_conv(ctx.wolfe_gap, r))
                }
                EmpiricalKind::WeakGrowth => {
                    let subopt = ctx.primal_at_x - opt_value.unwrap();
                    q * d * pow_conv(subopt.max(S::zero()), S::one() - r)
                        / (theta.powf(q) * ctx.wolfe_gap)
                }
            };
            best = Some(match best {
                Some(b) => b.max(ratio),
                None => ratio,
            });
        }
    }
    let m = best.ok_or_else(|| {
        Error::DegenerateInput("all samples had gap ≤ 1e-14 (or fell outside ε)".into())
    })?;
    let cert = GrowthCertificate {
        kind: match kind {
            EmpiricalKind::Growth => GrowthKind::Growth,
            EmpiricalKind::WeakGrowth => GrowthKind::WeakGrowth,
            EmpiricalKind::LocalGrowth { .. } => GrowthKind::LocalGrowth,
        },
        q,
        r,
        m,
        epsilon: match kind {
            EmpiricalKind::LocalGrowth { epsilon } => Some(epsilon),
            _ => None,
        },
        provenance: Provenance::Empirical { samples: samples.len(), theta_grid },
    };
    // An empirical estimate can legitimately be ≤ 0 (e.g. strongly convex Ψ
    // makes D negative somewhere); clamp to a tiny positive value so the
    // certificate stays well-formed.
    let cert = GrowthCertificate { m: cert.m.max(S::of(1e-300)), ..cert };
    cert.validate()?;
    Ok(cert)
}

/// Sampled curvature constant `sup 2·D_f(x+θ(s-x), x)/θ²` over supplied
/// pairs and a θ grid. Only meaningful for indicator Ψ (set-constrained
/// problems).
pub fn curvature_constant<S: Real>(
    problem: &Problem<S>,
    pairs: &[(Vector<S>, Vector<S>)],
    theta_grid: usize,
) -> Result<S> {
    if !problem.psi.is_indicator() {
        return Err(Error::Usage(
            "curvature_constant is defined for indicator Ψ (set-constrained problems)".into(),
        ));
    }
    if pairs.is_empty() || theta_grid < 1 {
        return Err(Error::Usage("curvature_constant needs pairs and θ-grid >= 1".into()));
    }
    let mut sup = S::zero();
    for (x, s) in pairs {
        for j in 1..=theta_grid {
            let theta = S::of(j as f64) / S::of(theta_grid as f64);
            let z = crate::linalg::convex_combine(x, s, theta);
            let d = crate::gap::bregman(&problem.f, &z, x)?;
            sup = sup.max(S::of(2.0) * d / (theta * theta));
        }
    }
    Ok(sup)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeSource {
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
}

/// A per-iteration dominating sequence for the best-gap (or suboptimality)
/// series under a growth certificate.
#[derive(Debug, Clone)]
pub struct RateEnvelope<S> {
    pub bounds: Vec<S>,
    /// First index whose bound enters the final regime
    /// (`b_k^{1-r} ≤ threshold`); `None` if the horizon ends first.
    pub k0: Option<usize>,
    pub source: EnvelopeSource,
    pub q: S,
    pub r: S,
    pub m: S,
    pub c_rho: Option<(S, S)>,
}

/// Envelope for exact line search: iterates
/// `b_{k+1} = b_k·(1 - ((q-1)/q)·min{1, (b_k^{1-r}/M)^{1/(q-1)}})`.
pub fn envelope_theorem1<S: Real>(
    q: S,
    r: S,
    m: S,
    gap0: S,
    horizon: usize,
) -> Result<RateEnvelope<S>> {
    check_envelope_params(q, r, m, gap0)?;
    let a = (q - S::one()) / q;
    let threshold = m;
    let bounds = iterate_map(q, r, m, S::one(), a, gap0, horizon);
    let envelope = RateEnvelope {
        k0: first_below(&bounds, r, threshold),
        bounds,
        source: EnvelopeSource::Theorem1,
        q,
        r,
        m,
        c_rho: None,
    };
    cross_check_closed_forms(&envelope, a, S::one())?;
    Ok(envelope)
}

/// Envelope for backtracking: iterates
/// `b_{k+1} = b_k·(1 - (c+ρ-1)·min{1, (q(1-c)·b_k^{1-r}/M)^{1/(q-1)}})`.
/// `ρ = 1` is allowed; with `c = (q-1)/q` it reproduces the
/// [`envelope_theorem1`] map.
pub fn envelope_theorem2<S: Real>(
    q: S,
    r: S,
    m: S,
    c: S,
    rho: S,
    gap0: S,
    horizon: usize,
) -> Result<RateEnvelope<S>> {
    check_envelope_params(q, r, m, gap0)?;
    StepsizeStrategy::backtracking(c, rho)?;
    let a = c + rho - S::one();
    let scale = q * (S::one() - c);
    let bounds = iterate_map(q, r, m, scale, a, gap0, horizon);
    let envelope = RateEnvelope {
        k0: first_below(&bounds, r, m / scale),
        bounds,
        source: EnvelopeSource::Theorem2,
        q,
        r,
        m,
        c_rho: Some((c, rho)),
    };
    cross_check_closed_forms(&envelope, a, scale)?;
    Ok(envelope)
}

/// Suboptimality envelope under a weak-growth certificate: the same maps
/// applied to `subopt₀` (exact line search when `c_rho` is `None`,
/// backtracking otherwise).
pub fn envelope_subopt<S: Real>(
    q: S,
    r: S,
    m: S,
    subopt0: S,
    horizon: usize,
    c_rho: Option<(S, S)>,
) -> Result<RateEnvelope<S>> {
    let env = match c_rho {
        None => {
            let e = envelope_theorem1(q, r, m, subopt0, horizon)?;
            RateEnvelope { source: EnvelopeSource::Theorem3, ..e }
        }
        Some((c, rho)) => {
            let e = envelope_theorem2(q, r, m, c, rho, subopt0, horizon)?;
            RateEnvelope { source: EnvelopeSource::Theorem4, ..e }
        }
    };
    Ok(env)
}

fn check_envelope_params<S: Real>(q: S, r: S, m: S, b0: S) -> Result<()> {
    if q <= S::one() {
        return Err(Error::Usage(format!("envelope requires q > 1, got {q}")));
    }
    if r < S::zero() || r > S::one() {
        return Err(Error::Usage(format!("envelope requires r in [0,1], got {r}")));
    }
    if m <= S::zero() {
        return Err(Error::Usage(format!("envelope requires M > 0, got {m}")));
    }
    if b0 <= S::zero() {
        return Err(Error::Usage(format!("envelope requires a positive initial value, got {b0}")));
    }
    Ok(())
}

/// `b^e`, with `b^0 = 1` even at `b = 0` (removable-singularity convention
/// for the `r = 1` case).
fn pow_conv<S: Real>(b: S, e: S) -> S {
    if e == S::zero() {
        S::one()
    } else {
        b.powf(e)
    }
}

fn iterate_map<S: Real>(q: S, r: S, m: S, scale: S, a: S, b0: S, horizon: usize) -> Vec<S> {
    let one = S::one();
    let mut bounds = Vec::with_capacity(horizon + 1);
    let mut b = b0;
    bounds.push(b);
    for _ in 0..horizon {
        if b <= S::zero() {
            bounds.push(S::zero());
            continue;
        }
        let arg = (scale * pow_conv(b, one - r) / m).powf((q - one).recip());
        b = b * (one - a * arg.min(one));
        bounds.push(b.max(S::zero()));
    }
    bounds
}

fn first_below<S: Real>(bounds: &[S], r: S, threshold: S) -> Option<usize> {
    bounds
        .iter()
        .position(|&b| pow_conv(b, S::one() - r) <= threshold)
}

/// Internal consistency: the iterated envelope must sit at or below every
/// applicable closed-form bound. `a` is the contraction coefficient and
/// `scale` the argument multiplier (`1` for the exact-linesearch map,
/// `q(1-c)` for the backtracking map).
fn cross_check_closed_forms<S: Real>(env: &RateEnvelope<S>, a: S, scale: S) -> Result<S> {
    let one = S::one();
    let slack = |v: S| v + S::of(1e-9) * (one + v.abs());
    let b0 = env.bounds[0];
    let (q, r, m) = (env.q, env.r, env.m);
    let mut checked = S::zero();

    // initial regime: while the min{} branch stays saturated the factor is
    // exactly (1-a), so the bounds match b0·(1-a)^k until the switch index
    let threshold = m / scale;
    for (k, &b) in env.bounds.iter().enumerate() {
        let form = b0 * (one - a).powf(S::of(k as f64));
        if (b - form).abs() > S::of(1e-9) * (one + form) {
            return Err(Error::Internal(format!(
                "envelope deviates from the initial-regime form at k={k}"
            )));
        }
        checked = checked.max(b);
        if pow_conv(b, one - r) <= threshold {
            break;
        }
    }

    if r == one {
        // constant factor: closed form is exact
        let factor = one - a * (scale / m).powf((q - one).recip()).min(one);
        for (k, &b) in env.bounds.iter().enumerate() {
            let form = b0 * factor.powf(S::of(k as f64));
            if (b - form).abs() > S::of(1e-9) * (one + form) {
                return Err(Error::Internal(format!(
                    "envelope deviates from the linear closed form at k={k}"
                )));
            }
        }
        return Ok(checked);
    }

    // sublinear regime: when the whole sequence starts inside the final
    // regime, the Borwein-Li-Yao bound applies with exponent (1-r)/(q-1)
    if pow_conv(b0, one - r) <= m / scale {
        let p = (one - r) / (q - one);
        let delta = a * (scale / m).powf((q - one).recip());
        for (k, &b) in env.bounds.iter().enumerate() {
            let form = (b0.powf(-p) + p * delta * S::of(k as f64)).powf(-p.recip());
            if b > slack(form) {
                return Err(Error::Internal(format!(
                    "envelope exceeds the sublinear closed form at k={k}"
                )));
            }
        }
        // the (2,0) special form 2M/(k+3) under exact line search
        if env.source == EnvelopeSource::Theorem1
            && q == S::of(2.0)
            && r == S::zero()
        {
            for (k, &b) in env.bounds.iter().enumerate().skip(1) {
                let form = S::of(2.0) * m / S::of(k as f64 + 3.0);
                if b > slack(form) {
                    return Err(Error::Internal(format!(
                        "envelope exceeds the 2M/(k+3) form at k={k}"
                    )));
                }
            }
        }
    }
    Ok(checked)
}

/// Which recorded series a certificate check runs against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Gap,
    Subopt,
}

#[derive(Debug, Clone)]
pub struct CertificateReport<S> {
    /// Per-transition check of the theorem's one-step recurrence inequality.
    pub recurrence_ok: Vec<bool>,
    /// Per-index check of envelope domination.
    pub envelope_ok: Vec<bool>,
    pub pass: bool,
    pub first_failing_k: Option<usize>,
    pub envelope: Option<RateEnvelope<S>>,
    /// Index from which the envelope starts (first iterate inside the
    /// locality for local certificates, 0 otherwise).
    pub envelope_start: usize,
}

/// Verifies a trajectory against a growth certificate: the per-iteration
/// recurrence inequality of the matching theorem and domination by the
/// iterated envelope. Local certificates gate both checks on the observed
/// gap entering the locality `gap < ε`.
pub fn check_certificate<S: Real>(
    trajectory: &Trajectory<S>,
    cert: &GrowthCertificate<S>,
    which: SeriesKind,
) -> Result<CertificateReport<S>> {
    cert.validate()?;
    let series: Vec<S> = match which {
        SeriesKind::Gap => trajectory.best_gaps(),
        SeriesKind::Subopt => trajectory
            .suboptimalities()
            .ok_or(Error::MissingMetadata("optimum"))?,
    };
    if matches!(which, SeriesKind::Subopt) && cert.kind != GrowthKind::WeakGrowth {
        return Err(Error::Usage(
            "suboptimality checks require a weak-growth certificate".into(),
        ));
    }

    let (a, scale, c_rho) = match trajectory.strategy {
        StepsizeStrategy::ExactLinesearch { .. } => {
            ((cert.q - S::one()) / cert.q, S::one(), None)
        }
        StepsizeStrategy::Backtracking { c, rho } => {
            (c + rho - S::one(), cert.q * (S::one() - c), Some((c, rho)))
        }
        StepsizeStrategy::OpenLoop => {
            return Err(Error::Usage(
                "no convergence theorem covers the open-loop schedule; use exact line search \
                 or backtracking trajectories"
                    .into(),
            ))
        }
    };
    let one = S::one();
    let in_scope = |v: S| match (cert.kind, cert.epsilon) {
        (GrowthKind::LocalGrowth, Some(eps)) => v < eps,
        _ => true,
    };

    // one-step recurrence inequality on consecutive in-scope entries
    let mut recurrence_ok = Vec::new();
    let mut first_failing = None;
    for (k, w) in series.windows(2).enumerate() {
        let (bk, bk1) = (w[0], w[1]);
        let ok = if !in_scope(bk) || bk <= S::zero() {
            true
        } else {
            let arg = (scale * pow_conv(bk, one - cert.r) / cert.m)
                .powf((cert.q - one).recip());
            let bound = bk * (one - a * arg.min(one));
            bk1 <= bound + S::of(1e-9) * (one + bound.abs())
        };
        if !ok && first_failing.is_none() {
            first_failing = Some(k + 1);
        }
        recurrence_ok.push(ok);
    }

    // envelope domination from the first in-scope index
    let start = series.iter().position(|&v| in_scope(v));
    let (envelope, envelope_ok, env_start) = match start {
        None => (None, vec![true; series.len()], series.len()),
        Some(start) => {
            let b0 = series[start];
            let horizon = series.len() - 1 - start;
            if b0 <= S::zero() {
                // already solved on entering scope; nothing to dominate
                (None, vec![true; series.len()], start)
            } else {
                let env = match c_rho {
                    None => envelope_theorem1(cert.q, cert.r, cert.m, b0, horizon)?,
                    Some((c, rho)) => {
                        envelope_theorem2(cert.q, cert.r, cert.m, c, rho, b0, horizon)?
                    }
                };
                let mut ok = vec![true; start];
                for (i, &obs) in series.iter().skip(start).enumerate() {
                    let bound = env.bounds[i];
                    let fine = obs <= bound + S::of(1e-9) * (one + bound);
                    if !fine && first_failing.is_none() {
                        first_failing = Some(start + i);
                    }
                    ok.push(fine);
                }
                (Some(env), ok, start)
            }
        }
    };

    let pass = recurrence_ok.iter().all(|&b| b) && envelope_ok.iter().all(|&b| b);
    Ok(CertificateReport {
        recurrence_ok,
        envelope_ok,
        pass,
        first_failing_k: if pass { None } else { first_failing },
        envelope,
        envelope_start: env_start,
    })
}

/// Borwein-Li-Yao bound: any nonnegative sequence with
/// `β_{i+1} ≤ β_i·(1 - δ_i·β_i^p)` satisfies
/// `β_k ≤ (β₀^{-p} + p·Σ_{i<k} δ_i)^{-1/p}`.
pub fn bly_bound<S: Real>(p: S, beta0: S, deltas: &[S], k: usize) -> Result<S> {
    if p <= S::zero() {
        return Err(Error::Usage(format!("bly_bound requires p > 0, got {p}")));
    }
    if beta0 < S::zero() {
        return Err(Error::Usage(format!("bly_bound requires β₀ >= 0, got {beta0}")));
    }
    if k > deltas.len() {
        return Err(Error::Usage(format!(
            "bly_bound needs {k} deltas but only {} were supplied",
            deltas.len()
        )));
    }
    if deltas[..k].iter().any(|&d| d < S::zero()) {
        return Err(Error::Usage("bly_bound requires nonnegative deltas".into()));
    }
    if beta0 == S::zero() {
        return Ok(S::zero());
    }
    let sum = deltas[..k].iter().fold(S::zero(), |acc, &d| acc + d);
    Ok((beta0.powf(-p) + p * sum).powf(-p.recip()))
}

/// Regression diagnostics over the trailing `window` entries of a positive
/// series: the slope of `log b_k` against `log(k+1)` (sublinear order) and
/// the exponential of the slope against `k` (linear factor).
pub fn rate_fit<S: Real>(series: &[S], window: usize) -> Result<(S, S)> {
    if window < 3 || series.len() < window {
        return Err(Error::Usage(format!(
            "rate_fit requires length >= window >= 3 (length {}, window {window})",
            series.len()
        )));
    }
    let tail = &series[series.len() - window..];
    if tail.iter().any(|&v| v <= S::zero()) {
        return Err(Error::Usage("rate_fit requires positive series entries".into()));
    }
    let offset = series.len() - window;
    let logs: Vec<S> = tail.iter().map(|&v| v.ln()).collect();
    let ks: Vec<S> = (0..window).map(|i| S::of((offset + i) as f64)).collect();
    let log_ks: Vec<S> = ks.iter().map(|&k| (k + S::one()).ln()).collect();
    let order = least_squares_slope(&log_ks, &logs);
    let factor = least_squares_slope(&ks, &logs).exp();
    Ok((order, factor))
}

fn least_squares_slope<S: Real>(xs: &[S], ys: &[S]) -> S {
    let n = S::of(xs.len() as f64);
    let mx = xs.iter().fold(S::zero(), |a, &v| a + v) / n;
    let my = ys.iter().fold(S::zero(), |a, &v| a + v) / n;
    let mut num = S::zero();
    let mut den = S::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        num = num + (x - mx) * (y - my);
        den = den + (x - mx) * (x - mx);
    }
    num / den
}
