//! Closed convex sets with closed-form Euclidean projections.

use nalgebra::DMatrix;

use crate::linops::{LinearOp, LinopError, Vector};

/// Least-squares residual above which `E v = d` is treated as inconsistent.
pub const AFFINE_CONSISTENCY_TOL: f64 = 1e-9;

/// Descriptor of a closed convex set in R^n.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    /// `{ v : lo ≤ v ≤ hi }`, bounds finite.
    Box { lo: Vector, hi: Vector },
    /// `{ v : ‖v − center‖ ≤ radius }`.
    Ball { center: Vector, radius: f64 },
    /// `{ v : ⟨normal, v⟩ ≤ offset }`.
    Halfspace { normal: Vector, offset: f64 },
    /// `{ v : E v = d }`.
    Affine(AffineSet),
}

/// `{ v : E v = d }` with the pseudo-inverse of `E` cached for projections.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSet {
    e: LinearOp,
    d: Vector,
    pinv: LinearOp,
}

impl AffineSet {
    pub fn new(e: LinearOp, d: Vector) -> Result<Self, LinopError> {
        d.check_dim(e.rows(), "affine set right-hand side")?;
        let m = e.to_nalgebra();
        let pinv = pseudo_inverse(&m);
        Ok(AffineSet {
            pinv: LinearOp::from_nalgebra(&pinv),
            e,
            d,
        })
    }

    pub fn matrix(&self) -> &LinearOp {
        &self.e
    }

    pub fn rhs(&self) -> &Vector {
        &self.d
    }

    /// `‖E E⁺ d − d‖`, zero exactly when the system is consistent.
    pub fn consistency_residual(&self) -> f64 {
        let v = self.pinv.apply_unchecked(&self.d);
        self.e.apply_unchecked(&v).dist(&self.d)
    }

    fn project(&self, x: &Vector) -> Vector {
        let r = &self.e.apply_unchecked(x) - &self.d;
        x - &self.pinv.apply_unchecked(&r)
    }
}

fn pseudo_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = smax * 1e-12 * (m.nrows().max(m.ncols()) as f64);
    svd.pseudo_inverse(eps.max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| DMatrix::zeros(m.ncols(), m.nrows()))
}

impl ConvexSet {
    pub fn boxed(lo: impl Into<Vector>, hi: impl Into<Vector>) -> Self {
        ConvexSet::Box {
            lo: lo.into(),
            hi: hi.into(),
        }
    }

    pub fn ball(center: impl Into<Vector>, radius: f64) -> Self {
        ConvexSet::Ball {
            center: center.into(),
            radius,
        }
    }

    pub fn halfspace(normal: impl Into<Vector>, offset: f64) -> Self {
        ConvexSet::Halfspace {
            normal: normal.into(),
            offset,
        }
    }

    pub fn affine(e: LinearOp, d: impl Into<Vector>) -> Result<Self, LinopError> {
        Ok(ConvexSet::Affine(AffineSet::new(e, d.into())?))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Box { lo, .. } => lo.dim(),
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::Halfspace { normal, .. } => normal.dim(),
            ConvexSet::Affine(a) => a.e.cols(),
        }
    }

    /// Euclidean projection. `x` must have dimension [`dim`](Self::dim).
    pub fn project(&self, x: &Vector) -> Result<Vector, LinopError> {
        x.check_dim(self.dim(), "set projection")?;
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &Vector) -> Vector {
        let mut out = vec![0.0; x.dim()];
        self.project_into(x, &mut out);
        out.into()
    }

    /// Writes the projection of `x` into `out`; both have length `dim`.
    pub(crate) fn project_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            ConvexSet::Box { lo, hi } => {
                for (o, ((v, l), h)) in out.iter_mut().zip(x.iter().zip(lo.iter()).zip(hi.iter())) {
                    *o = v.max(*l).min(*h);
                }
            }
            ConvexSet::Ball { center, radius } => {
                let r = x
                    .iter()
                    .zip(center.iter())
                    .map(|(v, c)| (v - c) * (v - c))
                    .sum::<f64>()
                    .sqrt();
                if r <= *radius {
                    out.copy_from_slice(x);
                } else {
                    let s = radius / r;
                    for (o, (v, c)) in out.iter_mut().zip(x.iter().zip(center.iter())) {
                        *o = c + s * (v - c);
                    }
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                let excess = normal.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - offset;
                if excess <= 0.0 {
                    out.copy_from_slice(x);
                } else {
                    let s = excess / normal.norm_sq();
                    for (o, (v, a)) in out.iter_mut().zip(x.iter().zip(normal.iter())) {
                        *o = v - s * a;
                    }
                }
            }
            ConvexSet::Affine(a) => out.copy_from_slice(&a.project(&Vector::from(x))),
        }
    }

    /// True when the set equals its reflection through the origin, which is
    /// what makes the projection an odd map.
    pub fn is_centrally_symmetric(&self) -> bool {
        match self {
            ConvexSet::Box { lo, hi } => lo.iter().zip(hi.iter()).all(|(l, h)| *l == -*h),
            ConvexSet::Ball { center, .. } => center.iter().all(|c| *c == 0.0),
            ConvexSet::Halfspace { .. } => false,
            ConvexSet::Affine(a) => a.d.iter().all(|c| *c == 0.0),
        }
    }

    /// Every broken invariant of the descriptor, in human-readable form.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            ConvexSet::Box { lo, hi } => {
                if lo.dim() != hi.dim() {
                    out.push(format!(
                        "box bounds have different lengths ({} vs {})",
                        lo.dim(),
                        hi.dim()
                    ));
                } else if !lo.is_finite() || !hi.is_finite() {
                    out.push(
                        "box bounds must be finite; express unbounded directions with a \
                         halfspace, or use affine_monotone for an unconstrained problem"
                            .into(),
                    );
                } else if let Some(i) = (0..lo.dim()).find(|&i| lo[i] > hi[i]) {
                    out.push(format!("box has lo[{i}] = {} > hi[{i}] = {}", lo[i], hi[i]));
                }
                if lo.dim() == 0 {
                    out.push("box has dimension 0".into());
                }
            }
            ConvexSet::Ball { center, radius } => {
                if !center.is_finite() {
                    out.push("ball center has non-finite entries".into());
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    out.push(format!("ball radius must be positive and finite, got {radius}"));
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                if !normal.is_finite() || !offset.is_finite() {
                    out.push("halfspace has non-finite data".into());
                } else if normal.norm_sq() == 0.0 {
                    out.push("halfspace normal must be nonzero".into());
                }
            }
            ConvexSet::Affine(a) => {
                if !a.e.is_finite() || !a.d.is_finite() {
                    out.push("affine set has non-finite data".into());
                } else {
                    let r = a.consistency_residual();
                    if r > AFFINE_CONSISTENCY_TOL {
                        out.push(format!(
                            "affine system E v = d is inconsistent (least-squares residual {r:.3e})"
                        ));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_examples() {
        let ball = ConvexSet::ball([0.0, 0.0], 1.0);
        let p = ball.project(&Vector::from([3.0, 4.0])).unwrap();
        assert!(p.dist(&Vector::from([0.6, 0.8])) < 1e-15);

        let h = ConvexSet::halfspace([1.0, 0.0], 0.0);
        assert_eq!(
            h.project(&Vector::from([2.0, 5.0])).unwrap(),
            Vector::from([0.0, 5.0])
        );

        let aff = ConvexSet::affine(LinearOp::from_rows(&[&[1.0, 1.0]]), [2.0]).unwrap();
        let p = aff.project(&Vector::from([0.0, 0.0])).unwrap();
        assert!(p.dist(&Vector::from([1.0, 1.0])) < 1e-14);
    }

    #[test]
    fn degenerate_box_projects_to_its_point() {
        let b = ConvexSet::boxed([0.5, -1.0], [0.5, -1.0]);
        assert!(b.violations().is_empty());
        assert_eq!(
            b.project(&Vector::from([9.0, 9.0])).unwrap(),
            Vector::from([0.5, -1.0])
        );
    }

    #[test]
    fn rank_deficient_affine_set() {
        // Two copies of the same equation.
        let e = LinearOp::from_rows(&[&[1.0, 1.0], &[2.0, 2.0]]);
        let aff = ConvexSet::affine(e.clone(), [2.0, 4.0]).unwrap();
        assert!(aff.violations().is_empty());
        let p = aff.project(&Vector::from([0.0, 0.0])).unwrap();
        assert!(p.dist(&Vector::from([1.0, 1.0])) < 1e-12);

        let bad = ConvexSet::affine(e, [2.0, 5.0]).unwrap();
        assert_eq!(bad.violations().len(), 1);
    }

    #[test]
    fn invalid_descriptors() {
        assert!(!ConvexSet::boxed([1.0], [0.0]).violations().is_empty());
        assert!(!ConvexSet::boxed([f64::NEG_INFINITY], [0.0]).violations().is_empty());
        assert!(!ConvexSet::ball([0.0], 0.0).violations().is_empty());
        assert!(!ConvexSet::halfspace([0.0, 0.0], 1.0).violations().is_empty());
        assert!(ConvexSet::project(&ConvexSet::ball([0.0], 1.0), &Vector::from([1.0, 2.0])).is_err());
    }

    #[test]
    fn symmetry_flags() {
        assert!(ConvexSet::boxed([-1.0, -2.0], [1.0, 2.0]).is_centrally_symmetric());
        assert!(!ConvexSet::boxed([0.0], [1.0]).is_centrally_symmetric());
        assert!(ConvexSet::ball([0.0], 2.0).is_centrally_symmetric());
        assert!(!ConvexSet::halfspace([1.0], 0.0).is_centrally_symmetric());
    }
}
