//! Catalog of maximal monotone mappings, each represented by its resolvent
//! `J_λ = (I + λB)⁻¹`.
//!
//! A resolvent of a maximal monotone mapping is single-valued and firmly
//! nonexpansive, and its fixed points are exactly the null points of the
//! mapping. Solvers never touch the set-valued mapping itself, only
//! [`Resolvent::apply`].

mod sets;

pub use sets::{AffineSet, ConvexSet, AFFINE_CONSISTENCY_TOL};

use thiserror::Error;

use crate::linops::{LinearOp, LinopError, Vector};

/// Smallest eigenvalue of `(G + Gᵀ)/2` tolerated before `v ↦ Gv + c` is
/// rejected as non-monotone.
pub const PSD_TOL: f64 = -1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MappingError {
    #[error(transparent)]
    Dimension(#[from] LinopError),
    #[error("invalid resolvent parameters: {0}")]
    InvalidParams(String),
    #[error("I + λG is numerically singular")]
    Singular,
    #[error("variational-inequality resolvent did not converge in {iterations} inner iterations (residual {residual:.3e})")]
    InnerNotConverged {
        last: Vector,
        residual: f64,
        iterations: usize,
    },
}

/// The concrete mapping `B`.
#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    /// `B ≡ 0`; every point is a null point.
    Zero { dim: usize },
    /// Normal cone `N_C` of a closed convex set; null points are `C`.
    NormalCone(ConvexSet),
    /// `∂(weight · ‖·‖₁)`; the only null point is the origin.
    SubdiffL1 { dim: usize, weight: f64 },
    /// `v ↦ Gv + c` with `G + Gᵀ` positive semidefinite.
    AffineMonotone { g: LinearOp, c: Vector },
    /// `v ↦ Gv + c + N_C(v)`, whose null points solve the variational
    /// inequality `⟨Gv + c, y − v⟩ ≥ 0` for all `y ∈ C`.
    AffineVi { g: LinearOp, c: Vector, set: ConvexSet },
    /// Cartesian product of mappings acting on consecutive blocks.
    Product(Vec<MonotoneMap>),
}

/// A maximal monotone mapping plus the user's claim that it is odd
/// (`B(−x) = −B(x)`).
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneMap {
    pub kind: MapKind,
    pub odd: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventParams {
    pub lambda: f64,
    pub inner_tol: f64,
    pub inner_max_iter: usize,
}

impl Default for ResolventParams {
    fn default() -> Self {
        ResolventParams {
            lambda: 1.0,
            inner_tol: 1e-12,
            inner_max_iter: 10_000,
        }
    }
}

impl ResolventParams {
    pub fn with_lambda(lambda: f64) -> Self {
        ResolventParams {
            lambda,
            ..Default::default()
        }
    }

    pub fn check(&self) -> Result<(), MappingError> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(MappingError::InvalidParams(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.inner_tol.is_finite() && self.inner_tol > 0.0) || self.inner_max_iter == 0 {
            return Err(MappingError::InvalidParams(
                "inner_tol and inner_max_iter must be positive".into(),
            ));
        }
        Ok(())
    }
}

impl MonotoneMap {
    pub fn new(kind: MapKind) -> Self {
        MonotoneMap { kind, odd: false }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(MapKind::Zero { dim })
    }

    pub fn normal_cone(set: ConvexSet) -> Self {
        Self::new(MapKind::NormalCone(set))
    }

    pub fn subdiff_l1(dim: usize, weight: f64) -> Self {
        Self::new(MapKind::SubdiffL1 { dim, weight })
    }

    pub fn affine(g: LinearOp, c: impl Into<Vector>) -> Self {
        Self::new(MapKind::AffineMonotone { g, c: c.into() })
    }

    pub fn affine_vi(g: LinearOp, c: impl Into<Vector>, set: ConvexSet) -> Self {
        Self::new(MapKind::AffineVi {
            g,
            c: c.into(),
            set,
        })
    }

    pub fn product(parts: Vec<MonotoneMap>) -> Self {
        let odd = !parts.is_empty() && parts.iter().all(|m| m.odd);
        MonotoneMap {
            kind: MapKind::Product(parts),
            odd,
        }
    }

    pub fn with_odd(mut self, odd: bool) -> Self {
        self.odd = odd;
        self
    }

    /// Ambient dimension of the space the mapping acts on.
    pub fn dim(&self) -> usize {
        match &self.kind {
            MapKind::Zero { dim } | MapKind::SubdiffL1 { dim, .. } => *dim,
            MapKind::NormalCone(s) => s.dim(),
            MapKind::AffineMonotone { g, .. } | MapKind::AffineVi { g, .. } => g.cols(),
            MapKind::Product(parts) => parts.iter().map(MonotoneMap::dim).sum(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            MapKind::Zero { .. } => "zero",
            MapKind::NormalCone(ConvexSet::Box { .. }) => "normal_cone_box",
            MapKind::NormalCone(ConvexSet::Ball { .. }) => "normal_cone_ball",
            MapKind::NormalCone(ConvexSet::Halfspace { .. }) => "normal_cone_halfspace",
            MapKind::NormalCone(ConvexSet::Affine(_)) => "normal_cone_affine",
            MapKind::SubdiffL1 { .. } => "subdiff_l1",
            MapKind::AffineMonotone { .. } => "affine_monotone",
            MapKind::AffineVi { .. } => "affine_vi",
            MapKind::Product(_) => "product",
        }
    }

    /// Whether the resolvent is odd for every `λ`, judged from the data.
    pub fn is_provably_odd(&self) -> bool {
        match &self.kind {
            MapKind::Zero { .. } | MapKind::SubdiffL1 { .. } => true,
            MapKind::NormalCone(s) => s.is_centrally_symmetric(),
            MapKind::AffineMonotone { c, .. } => c.iter().all(|v| *v == 0.0),
            MapKind::AffineVi { .. } => false,
            MapKind::Product(parts) => parts.iter().all(MonotoneMap::is_provably_odd),
        }
    }

    /// Every broken invariant, as messages. Empty means valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        match &self.kind {
            MapKind::Zero { dim } => {
                if *dim == 0 {
                    out.push("zero mapping has dimension 0".into());
                }
            }
            MapKind::NormalCone(s) => out.extend(s.violations()),
            MapKind::SubdiffL1 { dim, weight } => {
                if *dim == 0 {
                    out.push("subdiff_l1 has dimension 0".into());
                }
                if !(weight.is_finite() && *weight > 0.0) {
                    out.push(format!("subdiff_l1 weight must be positive, got {weight}"));
                }
            }
            MapKind::AffineMonotone { g, c } => affine_violations(g, c, &mut out),
            MapKind::AffineVi { g, c, set } => {
                affine_violations(g, c, &mut out);
                out.extend(set.violations());
                if set.dim() != g.cols() {
                    out.push(format!(
                        "affine_vi set has dimension {} but G is {}x{}",
                        set.dim(),
                        g.rows(),
                        g.cols()
                    ));
                }
            }
            MapKind::Product(parts) => {
                if parts.is_empty() {
                    out.push("product mapping has no components".into());
                }
                for (i, p) in parts.iter().enumerate() {
                    out.extend(p.violations().into_iter().map(|m| format!("component {i}: {m}")));
                }
            }
        }
        if self.odd && !self.is_provably_odd() {
            out.push(format!(
                "odd flag set on a {} mapping whose resolvent is not odd",
                self.kind_name()
            ));
        }
        out
    }

    /// Warnings that depend on the resolvent parameter but do not make the
    /// mapping unusable.
    pub fn warnings(&self, params: &ResolventParams) -> Vec<String> {
        match &self.kind {
            MapKind::AffineVi { g, .. } => {
                let gnorm = g.gram_norm_default().safe().sqrt();
                if params.lambda * gnorm >= 1.0 {
                    vec![format!(
                        "affine_vi: λ‖G‖ ≈ {:.3} ≥ 1, the inner loop switches from fixed-point iteration to operator splitting",
                        params.lambda * gnorm
                    )]
                } else {
                    Vec::new()
                }
            }
            MapKind::Product(parts) => parts.iter().flat_map(|p| p.warnings(params)).collect(),
            _ => Vec::new(),
        }
    }

    /// Precomputes whatever `J_λ` needs (matrix inverses, step sizes).
    pub fn resolvent(&self, params: &ResolventParams) -> Result<Resolvent, MappingError> {
        params.check()?;
        let lambda = params.lambda;
        let op = match &self.kind {
            MapKind::Zero { .. } => Prepared::Identity,
            MapKind::NormalCone(s) => Prepared::Project(s.clone()),
            MapKind::SubdiffL1 { weight, .. } => Prepared::Shrink(lambda * weight),
            MapKind::AffineMonotone { g, c } => {
                c.check_dim(g.rows(), "affine_monotone offset")?;
                let n = g.rows();
                let m = nalgebra::DMatrix::identity(n, n) + g.to_nalgebra() * lambda;
                let inv = m.try_inverse().ok_or(MappingError::Singular)?;
                if inv.iter().any(|v| !v.is_finite()) {
                    return Err(MappingError::Singular);
                }
                Prepared::Linear {
                    inv: LinearOp::from_nalgebra(&inv),
                    shift: c.scale(lambda),
                }
            }
            MapKind::AffineVi { g, c, set } => {
                c.check_dim(g.rows(), "affine_vi offset")?;
                let gnorm = g.gram_norm_default().safe().sqrt();
                // The plain fixed-point map is a λ‖G‖-contraction; otherwise
                // split v ↦ (I+λG)v − (x−λc) from the normal cone.
                let inner = if lambda * gnorm < 1.0 {
                    ViInner::Contraction
                } else {
                    let shifted = add_identity(g, lambda);
                    let sigma = 1.0 / shifted.gram_norm_default().safe().sqrt().sqrt();
                    let m = add_identity(&shifted, sigma).to_nalgebra();
                    let inv = m.try_inverse().ok_or(MappingError::Singular)?;
                    ViInner::Splitting {
                        sigma,
                        inv: LinearOp::from_nalgebra(&inv),
                    }
                };
                Prepared::Vi(ViResolvent {
                    g: g.clone(),
                    c: c.clone(),
                    set: set.clone(),
                    lambda,
                    inner,
                    tol: params.inner_tol,
                    max_iter: params.inner_max_iter,
                })
            }
            MapKind::Product(parts) => Prepared::Product(
                parts
                    .iter()
                    .map(|p| p.resolvent(params))
                    .collect::<Result<_, _>>()?,
            ),
        };
        Ok(Resolvent {
            dim: self.dim(),
            op,
        })
    }
}

fn affine_violations(g: &LinearOp, c: &Vector, out: &mut Vec<String>) {
    if !g.is_square() {
        out.push(format!("G must be square, got {}x{}", g.rows(), g.cols()));
        return;
    }
    if c.dim() != g.rows() {
        out.push(format!(
            "offset c has dimension {} but G is {}x{}",
            c.dim(),
            g.rows(),
            g.cols()
        ));
    }
    if !g.is_finite() || !c.is_finite() {
        out.push("G or c has non-finite entries".into());
        return;
    }
    if let Some(ev) = g.min_symmetric_eigenvalue() {
        if ev < PSD_TOL {
            out.push(format!(
                "G + Gᵀ is not positive semidefinite: smallest eigenvalue of (G + Gᵀ)/2 is {ev:.6e}"
            ));
        }
    }
}

fn add_identity(g: &LinearOp, lambda: f64) -> LinearOp {
    let n = g.rows();
    let data = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            lambda * g.get(i, j) + if i == j { 1.0 } else { 0.0 }
        })
        .collect();
    LinearOp::new(n, n, data).expect("square by construction")
}

/// A prepared resolvent `J_λ` of one mapping.
#[derive(Debug, Clone)]
pub struct Resolvent {
    dim: usize,
    op: Prepared,
}

#[derive(Debug, Clone)]
enum Prepared {
    Identity,
    Project(ConvexSet),
    Shrink(f64),
    /// `v = inv · (x − shift)`.
    Linear { inv: LinearOp, shift: Vector },
    Vi(ViResolvent),
    Product(Vec<Resolvent>),
}

#[derive(Debug, Clone)]
struct ViResolvent {
    g: LinearOp,
    c: Vector,
    set: ConvexSet,
    lambda: f64,
    inner: ViInner,
    tol: f64,
    max_iter: usize,
}

#[derive(Debug, Clone)]
enum ViInner {
    /// `v ← P(x − λ(Gv + c))`.
    Contraction,
    /// Douglas–Rachford on `A v = (I+λG)v − (x−λc)` plus `N_set`, with
    /// `inv = (I + σ(I+λG))⁻¹`.
    Splitting { sigma: f64, inv: LinearOp },
}

impl ViResolvent {
    /// Solves for `v = J_λ x` into `out`. `state` holds the inner iterate
    /// (and the splitting variable) of a previous call; it is reused as the
    /// starting point when its length fits and refreshed on return.
    fn solve_into(&self, x: &[f64], out: &mut [f64], state: &mut Vec<f64>) -> Result<(), MappingError> {
        let n = x.len();
        let lambda = self.lambda;
        let anchor: Vec<f64> = x.iter().zip(self.c.iter()).map(|(xi, ci)| xi - lambda * ci).collect();
        if state.len() != 2 * n {
            state.clear();
            state.resize(2 * n, 0.0);
            self.set.project_into(x, &mut state[..n]);
            let (v, w) = state.split_at_mut(n);
            w.copy_from_slice(v);
        }
        let (v, w) = state.split_at_mut(n);
        let mut tmp = vec![0.0; n];
        let mut t = vec![0.0; n];
        let mut residual = f64::INFINITY;
        for _ in 0..self.max_iter {
            // t = P(x − λ(Gv + c))
            self.g.apply_into(v, &mut tmp);
            for (g, a) in tmp.iter_mut().zip(&anchor) {
                *g = a - lambda * *g;
            }
            self.set.project_into(&tmp, &mut t);
            residual = v.iter().zip(&t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if residual <= self.tol {
                out.copy_from_slice(v);
                return Ok(());
            }
            match &self.inner {
                ViInner::Contraction => v.copy_from_slice(&t),
                ViInner::Splitting { sigma, inv } => {
                    for ((m, wi), a) in tmp.iter_mut().zip(w.iter()).zip(&anchor) {
                        *m = wi + sigma * a;
                    }
                    inv.apply_into(&tmp, &mut t);
                    for ((m, half), wi) in tmp.iter_mut().zip(&t).zip(w.iter()) {
                        *m = 2.0 * half - wi;
                    }
                    self.set.project_into(&tmp, v);
                    for ((wi, u), half) in w.iter_mut().zip(v.iter()).zip(&t) {
                        *wi += u - half;
                    }
                }
            }
        }
        let last = Vector::from(&*v);
        state.clear();
        Err(MappingError::InnerNotConverged {
            last,
            residual,
            iterations: self.max_iter,
        })
    }
}

/// Inner-loop state of the variational-inequality blocks of one resolvent,
/// carried between calls at nearby points.
#[derive(Debug, Clone, Default)]
pub(crate) struct WarmStart {
    slots: Vec<Vec<f64>>,
}

impl Resolvent {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector, MappingError> {
        x.check_dim(self.dim, "resolvent")?;
        self.apply_unchecked(x)
    }

    fn apply_unchecked(&self, x: &Vector) -> Result<Vector, MappingError> {
        let mut out = vec![0.0; x.dim()];
        self.apply_into(x, &mut out)?;
        Ok(out.into())
    }

    /// Writes `J_λ x` into `out`. Product mappings work block by block
    /// without intermediate allocation.
    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), MappingError> {
        self.apply_warm(x, out, &mut WarmStart::default())
    }

    /// [`Self::apply_into`] with inner loops started from `warm`.
    pub(crate) fn apply_warm(&self, x: &[f64], out: &mut [f64], warm: &mut WarmStart) -> Result<(), MappingError> {
        self.apply_slot(x, out, warm, &mut 0)
    }

    fn apply_slot(&self, x: &[f64], out: &mut [f64], warm: &mut WarmStart, slot: &mut usize) -> Result<(), MappingError> {
        match &self.op {
            Prepared::Identity => out.copy_from_slice(x),
            Prepared::Project(s) => s.project_into(x, out),
            Prepared::Shrink(t) => {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = v.signum() * (v.abs() - t).max(0.0);
                }
            }
            Prepared::Linear { inv, shift } => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = inv
                        .row(i)
                        .iter()
                        .zip(x.iter().zip(shift.iter()))
                        .map(|(a, (v, s))| a * (v - s))
                        .sum();
                }
            }
            Prepared::Vi(vi) => {
                if warm.slots.len() <= *slot {
                    warm.slots.resize_with(*slot + 1, Vec::new);
                }
                let state = &mut warm.slots[*slot];
                *slot += 1;
                vi.solve_into(x, out, state)?;
            }
            Prepared::Product(parts) => {
                let mut start = 0;
                for p in parts {
                    let end = start + p.dim;
                    p.apply_slot(&x[start..end], &mut out[start..end], warm, slot)?;
                    start = end;
                }
            }
        }
        Ok(())
    }

    /// `‖x − J_λ x‖`; zero exactly at null points of the mapping.
    pub fn residual(&self, x: &Vector) -> Result<f64, MappingError> {
        Ok(x.dist(&self.apply(x)?))
    }
}

/// `J_λ^m(x)`.
pub fn resolve(m: &MonotoneMap, params: &ResolventParams, x: &Vector) -> Result<Vector, MappingError> {
    m.resolvent(params)?.apply(x)
}

/// `‖x − J_λ^m(x)‖`.
pub fn fixed_point_residual(
    m: &MonotoneMap,
    params: &ResolventParams,
    x: &Vector,
) -> Result<f64, MappingError> {
    m.resolvent(params)?.residual(x)
}

/// Euclidean projection onto `set`.
pub fn project_set(set: &ConvexSet, x: &Vector) -> Result<Vector, LinopError> {
    set.project(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(lambda: f64) -> ResolventParams {
        ResolventParams::with_lambda(lambda)
    }

    #[test]
    fn resolve_examples() {
        let x = Vector::from([7.0, -2.0]);
        assert_eq!(resolve(&MonotoneMap::zero(2), &p(3.0), &x).unwrap(), x);

        let boxed = MonotoneMap::normal_cone(ConvexSet::boxed([0.0, 0.0], [1.0, 1.0]));
        assert_eq!(
            resolve(&boxed, &p(0.5), &Vector::from([2.0, -3.0])).unwrap(),
            Vector::from([1.0, 0.0])
        );

        let l1 = MonotoneMap::subdiff_l1(1, 1.0);
        assert_eq!(resolve(&l1, &p(1.0), &Vector::from([3.0])).unwrap(), Vector::from([2.0]));

        let aff = MonotoneMap::affine(LinearOp::identity(1), [0.0]);
        let v = resolve(&aff, &p(1.0), &Vector::from([4.0])).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn affine_vi_on_halfline() {
        // [0, ∞) as the halfspace -v ≤ 0.
        let m = MonotoneMap::affine_vi(
            LinearOp::from_rows(&[&[1.0]]),
            [0.0],
            ConvexSet::halfspace([-1.0], 0.0),
        );
        let v = resolve(&m, &p(1.0), &Vector::from([-2.0])).unwrap();
        assert_eq!(v, Vector::from([0.0]));
        // Membership oracle: x − v − λ(Gv + c) = -2 must lie in N_{[0,∞)}(0) = (-∞, 0].
        let d = -2.0 - v[0] - v[0];
        assert!(d <= 0.0);
    }

    #[test]
    fn affine_vi_splitting_when_lambda_g_is_large() {
        let g = LinearOp::from_rows(&[&[3.0, 1.0], &[-1.0, 2.0]]);
        let set = ConvexSet::boxed([-1.0, -1.0], [1.0, 1.0]);
        let m = MonotoneMap::affine_vi(g.clone(), [0.5, -4.0], set.clone());
        let params = p(2.0);
        assert_eq!(m.warnings(&params).len(), 1);
        let x = Vector::from([3.0, 0.25]);
        let v = resolve(&m, &params, &x).unwrap();
        let field = &g.apply(&v).unwrap() + &Vector::from([0.5, -4.0]);
        let t = set.project(&x.add_scaled(-params.lambda, &field)).unwrap();
        assert!(v.dist(&t) <= 1e-10, "{v:?} vs {t:?}");
    }

    #[test]
    fn affine_vi_reports_inner_failure() {
        let m = MonotoneMap::affine_vi(
            LinearOp::from_rows(&[&[0.9]]),
            [0.0],
            ConvexSet::boxed([-10.0], [10.0]),
        );
        let params = ResolventParams {
            lambda: 1.0,
            inner_tol: 1e-15,
            inner_max_iter: 2,
        };
        match resolve(&m, &params, &Vector::from([5.0])) {
            Err(MappingError::InnerNotConverged { iterations, .. }) => assert_eq!(iterations, 2),
            other => panic!("expected inner failure, got {other:?}"),
        }
    }

    #[test]
    fn fixed_point_residual_examples() {
        let unit = MonotoneMap::normal_cone(ConvexSet::boxed([0.0, 0.0], [1.0, 1.0]));
        assert_eq!(
            fixed_point_residual(&unit, &p(1.0), &Vector::from([0.5, 0.5])).unwrap(),
            0.0
        );
        let seg = MonotoneMap::normal_cone(ConvexSet::boxed([0.0], [1.0]));
        assert_eq!(fixed_point_residual(&seg, &p(1.0), &Vector::from([2.0])).unwrap(), 1.0);
        let l1 = MonotoneMap::subdiff_l1(1, 1.0);
        assert_eq!(fixed_point_residual(&l1, &p(1.0), &Vector::from([0.5])).unwrap(), 0.5);
    }

    #[test]
    fn product_applies_blockwise() {
        let m = MonotoneMap::product(vec![
            MonotoneMap::normal_cone(ConvexSet::boxed([0.0], [1.0])),
            MonotoneMap::subdiff_l1(2, 1.0),
        ]);
        assert_eq!(m.dim(), 3);
        let v = resolve(&m, &p(1.0), &Vector::from([5.0, 3.0, -0.5])).unwrap();
        assert_eq!(v, Vector::from([1.0, 2.0, 0.0]));
    }

    #[test]
    fn odd_flag_validation() {
        let ok = [
            MonotoneMap::zero(2),
            MonotoneMap::normal_cone(ConvexSet::boxed([-1.0], [1.0])),
            MonotoneMap::normal_cone(ConvexSet::ball([0.0, 0.0], 1.0)),
            MonotoneMap::normal_cone(ConvexSet::affine(LinearOp::from_rows(&[&[1.0, 1.0]]), [0.0]).unwrap()),
            MonotoneMap::subdiff_l1(3, 0.5),
            MonotoneMap::affine(LinearOp::identity(2), [0.0, 0.0]),
        ];
        for m in ok {
            assert!(m.clone().with_odd(true).violations().is_empty(), "{m:?}");
        }
        let bad = [
            MonotoneMap::normal_cone(ConvexSet::boxed([0.0], [1.0])),
            MonotoneMap::normal_cone(ConvexSet::ball([1.0], 1.0)),
            MonotoneMap::normal_cone(ConvexSet::halfspace([1.0], 0.0)),
            MonotoneMap::affine(LinearOp::identity(1), [1.0]),
            MonotoneMap::affine_vi(LinearOp::identity(1), [0.0], ConvexSet::boxed([-1.0], [1.0])),
        ];
        for m in bad {
            assert_eq!(m.clone().with_odd(true).violations().len(), 1, "{m:?}");
        }
    }

    #[test]
    fn non_monotone_affine_is_rejected() {
        let m = MonotoneMap::affine(LinearOp::diagonal(&[1.0, -0.5]), [0.0, 0.0]);
        let v = m.violations();
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("-5.0"), "{v:?}");
        let non_square = MonotoneMap::affine(LinearOp::zeros(1, 2), [0.0]);
        assert!(!non_square.violations().is_empty());
    }

    #[test]
    fn bad_lambda_is_rejected() {
        let err = resolve(&MonotoneMap::zero(1), &p(0.0), &Vector::from([1.0])).unwrap_err();
        assert!(matches!(err, MappingError::InvalidParams(_)));
        let err = resolve(&MonotoneMap::zero(2), &p(1.0), &Vector::from([1.0])).unwrap_err();
        assert!(matches!(err, MappingError::Dimension(_)));
    }
}
