//! Declarative JSON configs: instance and strategy descriptors, x0 policies,
//! and certificate requests, all round-tripping through serde.

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use condgrad::analysis::{
    empirical_growth_constant, theoretical_growth_constant, EmpiricalKind, GrowthCase,
    GrowthCertificate, GrowthKind, Provenance,
};
use condgrad::model::Problem;
use condgrad::problems::{
    error_bound_instance, holder_objective_over_set, local_scaling_instance,
    quadratic_over_lp_ball, quadratic_over_simplex, simplex_toy, smooth_plus_strongly_convex,
    SetDescriptor,
};
use condgrad::stepsize::StepsizeStrategy;

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceDescriptor {
    QuadraticOverSimplex { n: usize, seed: u64 },
    SimplexToy { n: usize },
    QuadraticOverLpBall { n: usize, p: f64, radius: f64, center: Vec<f64>, seed: u64 },
    SmoothPlusStronglyConvex { n: usize, mu: f64, seed: u64 },
    HolderOverLpBall { n: usize, nu: f64, p: f64, radius: f64, shift: Vec<f64>, seed: u64 },
    ErrorBound { n: usize },
    LocalScaling { n: usize },
}

impl InstanceDescriptor {
    pub fn build(&self) -> Result<Arc<Problem<f64>>, CliError> {
        let problem = match self {
            InstanceDescriptor::QuadraticOverSimplex { n, seed } => {
                quadratic_over_simplex(*n, *seed)?
            }
            InstanceDescriptor::SimplexToy { n } => simplex_toy(*n),
            InstanceDescriptor::QuadraticOverLpBall { n, p, radius, center, seed } => {
                quadratic_over_lp_ball(*n, *p, *radius, center, *seed)?
            }
            InstanceDescriptor::SmoothPlusStronglyConvex { n, mu, seed } => {
                smooth_plus_strongly_convex(*n, *mu, *seed)?
            }
            InstanceDescriptor::HolderOverLpBall { n, nu, p, radius, shift, seed } => {
                holder_objective_over_set(
                    *n,
                    *nu,
                    SetDescriptor::LpBall { p: *p, radius: *radius },
                    shift,
                    *seed,
                )?
            }
            InstanceDescriptor::ErrorBound { n } => error_bound_instance(*n),
            InstanceDescriptor::LocalScaling { n } => local_scaling_instance(*n)?,
        };
        Ok(Arc::new(problem))
    }

    /// Reseeds descriptors that carry a seed; the rest are returned as-is.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut d = self.clone();
        match &mut d {
            InstanceDescriptor::QuadraticOverSimplex { seed: s, .. }
            | InstanceDescriptor::QuadraticOverLpBall { seed: s, .. }
            | InstanceDescriptor::SmoothPlusStronglyConvex { seed: s, .. }
            | InstanceDescriptor::HolderOverLpBall { seed: s, .. } => *s = seed,
            InstanceDescriptor::SimplexToy { .. }
            | InstanceDescriptor::ErrorBound { .. }
            | InstanceDescriptor::LocalScaling { .. } => {}
        }
        d
    }

    /// The growth case this instance's metadata naturally supports.
    pub fn default_case(&self) -> GrowthCase {
        self.default_case_name().into()
    }

    pub fn default_case_name(&self) -> CaseName {
        match self {
            InstanceDescriptor::QuadraticOverSimplex { .. }
            | InstanceDescriptor::SimplexToy { .. }
            | InstanceDescriptor::HolderOverLpBall { .. } => CaseName::SmoothBounded,
            InstanceDescriptor::QuadraticOverLpBall { radius, center, .. } => {
                let norm: f64 = center.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > *radius {
                    CaseName::UniformlyConvexSet
                } else {
                    CaseName::SmoothBounded
                }
            }
            InstanceDescriptor::SmoothPlusStronglyConvex { .. } => {
                CaseName::UniformlyConvexPsi
            }
            InstanceDescriptor::ErrorBound { .. } => CaseName::ErrorBound,
            InstanceDescriptor::LocalScaling { .. } => CaseName::LocalScaling,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategyDescriptor {
    Exact,
    Backtrack { c: f64, rho: f64 },
    OpenLoop,
}

impl StrategyDescriptor {
    pub fn build(&self) -> Result<StepsizeStrategy<f64>, CliError> {
        Ok(match self {
            StrategyDescriptor::Exact => StepsizeStrategy::exact(),
            StrategyDescriptor::Backtrack { c, rho } => StepsizeStrategy::backtracking(*c, *rho)?,
            StrategyDescriptor::OpenLoop => StepsizeStrategy::OpenLoop,
        })
    }

    pub fn label(&self) -> String {
        match self {
            StrategyDescriptor::Exact => "exact".into(),
            StrategyDescriptor::Backtrack { c, rho } => format!("backtrack:{c},{rho}"),
            StrategyDescriptor::OpenLoop => "openloop".into(),
        }
    }
}

impl FromStr for StrategyDescriptor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(StrategyDescriptor::Exact),
            "openloop" => Ok(StrategyDescriptor::OpenLoop),
            other => {
                let params = other.strip_prefix("backtrack:").ok_or_else(|| {
                    format!("unknown strategy {other:?}; expected exact, backtrack:c,rho, or openloop")
                })?;
                let (c, rho) = params
                    .split_once(',')
                    .ok_or_else(|| "backtrack strategy needs c,rho".to_string())?;
                let c = c.trim().parse::<f64>().map_err(|e| format!("bad c: {e}"))?;
                let rho = rho.trim().parse::<f64>().map_err(|e| format!("bad rho: {e}"))?;
                Ok(StrategyDescriptor::Backtrack { c, rho })
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum X0Policy {
    /// An extreme point: the LMO answer at the gradient of the reference
    /// point.
    #[default]
    Vertex,
    /// The instance's reference point.
    Center,
    Given { x: Vec<f64> },
}

impl X0Policy {
    pub fn resolve(&self, problem: &Problem<f64>) -> Vec<f64> {
        match self {
            X0Policy::Vertex => {
                let g = problem.f.gradient(&problem.reference_point);
                problem.psi.lmo(&g)
            }
            X0Policy::Center => problem.reference_point.clone(),
            X0Policy::Given { x } => x.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CaseName {
    SmoothBounded,
    UniformlyConvexPsi,
    UniformlyConvexSet,
    ErrorBound,
    LocalScaling,
}

impl From<CaseName> for GrowthCase {
    fn from(c: CaseName) -> GrowthCase {
        match c {
            CaseName::SmoothBounded => GrowthCase::SmoothBounded,
            CaseName::UniformlyConvexPsi => GrowthCase::UniformlyConvexPsi,
            CaseName::UniformlyConvexSet => GrowthCase::UniformlyConvexSet,
            CaseName::ErrorBound => GrowthCase::ErrorBound,
            CaseName::LocalScaling => GrowthCase::LocalScaling,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    Growth,
    WeakGrowth,
    LocalGrowth,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertificateRequest {
    Theoretical {
        case: CaseName,
    },
    Empirical {
        kind: KindName,
        q: f64,
        r: f64,
        samples: usize,
        theta_grid: usize,
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        seed: u64,
    },
    Manual {
        kind: KindName,
        q: f64,
        r: f64,
        m: f64,
        #[serde(default)]
        epsilon: Option<f64>,
    },
}

impl CertificateRequest {
    pub fn realize(&self, problem: &Problem<f64>) -> Result<GrowthCertificate<f64>, CliError> {
        match self {
            CertificateRequest::Theoretical { case } => {
                Ok(theoretical_growth_constant(&problem.metadata, (*case).into())?)
            }
            CertificateRequest::Empirical { kind, q, r, samples, theta_grid, epsilon, seed } => {
                let kind = match (kind, epsilon) {
                    (KindName::Growth, _) => EmpiricalKind::Growth,
                    (KindName::WeakGrowth, _) => EmpiricalKind::WeakGrowth,
                    (KindName::LocalGrowth, Some(e)) => EmpiricalKind::LocalGrowth { epsilon: *e },
                    (KindName::LocalGrowth, None) => {
                        return Err(CliError::Usage(
                            "empirical local_growth certificate requires epsilon".into(),
                        ))
                    }
                };
                let points = problem.sample_domain(*samples, *seed);
                Ok(empirical_growth_constant(problem, kind, *q, *r, &points, *theta_grid)?)
            }
            CertificateRequest::Manual { kind, q, r, m, epsilon } => Ok(GrowthCertificate {
                kind: match kind {
                    KindName::Growth => GrowthKind::Growth,
                    KindName::WeakGrowth => GrowthKind::WeakGrowth,
                    KindName::LocalGrowth => GrowthKind::LocalGrowth,
                },
                q: *q,
                r: *r,
                m: *m,
                epsilon: *epsilon,
                provenance: Provenance::Empirical { samples: 0, theta_grid: 0 },
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceDescriptor,
    #[serde(default)]
    pub strategy: Option<StrategyDescriptor>,
    #[serde(default)]
    pub x0: X0Policy,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub gap_tol: Option<f64>,
    #[serde(default)]
    pub certificates: Vec<CertificateRequest>,
    /// Keep every m-th record (plus the last) in the trajectory CSV.
    #[serde(default)]
    pub thin: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub instances: Vec<InstanceDescriptor>,
    pub strategies: Vec<StrategyDescriptor>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub x0: X0Policy,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub gap_tol: Option<f64>,
}
