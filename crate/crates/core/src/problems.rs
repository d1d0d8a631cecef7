//! Problem instances: `p` mappings on the domain, `r` mappings on image
//! spaces, and the linear operators linking them.

use std::fmt;

use crate::linops::{LinearOp, Vector};
use crate::mappings::{ConvexSet, MapKind, MappingError, MonotoneMap, ResolventParams};

/// Residual bound a certified solution must meet at load time.
pub const CERTIFICATION_TOL: f64 = 1e-9;

/// A split common null point instance: find `x ∈ R^n1` with
/// `0 ∈ B_i(x)` for all `i` and `0 ∈ F_j(A_j x)` for all `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScnppInstance {
    pub n1: usize,
    pub b_maps: Vec<MonotoneMap>,
    pub f_maps: Vec<MonotoneMap>,
    pub a_ops: Vec<LinearOp>,
    pub certified_solution: Option<Vector>,
    /// Caller's assertion that the solution set is empty.
    pub certified_empty: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// All invariant violations found in an instance.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            location: location.into(),
            message: message.into(),
        });
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn into_result(self) -> Result<(), ValidationReport> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(self)
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// Largest per-mapping residuals at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `max_i ‖x − J^{B_i} x‖`
    pub primal: f64,
    /// `max_j ‖A_j x − J^{F_j}(A_j x)‖`
    pub image: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.image)
    }
}

impl ScnppInstance {
    /// The two-mapping instance `0 ∈ B(x)`, `0 ∈ F(Ax)`.
    pub fn two_mapping(b: MonotoneMap, f: MonotoneMap, a: LinearOp) -> Self {
        ScnppInstance {
            n1: a.cols(),
            b_maps: vec![b],
            f_maps: vec![f],
            a_ops: vec![a],
            certified_solution: None,
            certified_empty: None,
        }
    }

    pub fn with_solution(mut self, x: impl Into<Vector>) -> Self {
        self.certified_solution = Some(x.into());
        self
    }

    pub fn with_certified_empty(mut self) -> Self {
        self.certified_empty = Some(true);
        self
    }

    pub fn p(&self) -> usize {
        self.b_maps.len()
    }

    pub fn r(&self) -> usize {
        self.f_maps.len()
    }

    pub fn is_two_mapping(&self) -> bool {
        self.p() == 1 && self.r() == 1
    }

    pub fn is_certified_empty(&self) -> bool {
        self.certified_empty == Some(true)
    }

    /// Checks every structural and numerical invariant, collecting all
    /// violations instead of stopping at the first.
    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut report = self.structural_report();
        if report.is_empty() {
            if let Some(x) = &self.certified_solution {
                self.check_certificate(x, &mut report);
            }
        }
        report.into_result()
    }

    fn structural_report(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.n1 == 0 {
            report.push("space.n1", "domain dimension must be positive");
        }
        if self.b_maps.is_empty() && self.f_maps.is_empty() {
            report.push("mappings", "instance has no mappings (p = r = 0)");
        }
        for (i, b) in self.b_maps.iter().enumerate() {
            let loc = format!("mappings.b[{i}]");
            if b.dim() != self.n1 {
                report.push(&loc, format!("dimension {} does not match n1 = {}", b.dim(), self.n1));
            }
            for m in b.violations() {
                report.push(&loc, m);
            }
        }
        if self.a_ops.len() != self.f_maps.len() {
            report.push(
                "operators.a",
                format!(
                    "{} operators given for {} image-side mappings",
                    self.a_ops.len(),
                    self.f_maps.len()
                ),
            );
        }
        for (j, a) in self.a_ops.iter().enumerate() {
            let loc = format!("operators.a[{j}]");
            if a.cols() != self.n1 {
                report.push(&loc, format!("has {} columns, expected n1 = {}", a.cols(), self.n1));
            }
            if !a.is_finite() {
                report.push(&loc, "has non-finite entries");
            }
            if let Some(f) = self.f_maps.get(j) {
                if a.rows() != f.dim() {
                    report.push(
                        &loc,
                        format!("has {} rows but mappings.f[{j}] has dimension {}", a.rows(), f.dim()),
                    );
                }
            }
        }
        for (j, f) in self.f_maps.iter().enumerate() {
            for m in f.violations() {
                report.push(format!("mappings.f[{j}]"), m);
            }
        }
        if let Some(x) = &self.certified_solution {
            if x.dim() != self.n1 {
                report.push(
                    "certified_solution",
                    format!("has dimension {}, expected {}", x.dim(), self.n1),
                );
            } else if !x.is_finite() {
                report.push("certified_solution", "has non-finite entries");
            }
            if self.is_certified_empty() {
                report.push(
                    "certified_empty",
                    "instance declares an empty solution set but carries a certified solution",
                );
            }
        }
        report
    }

    fn check_certificate(&self, x: &Vector, report: &mut ValidationReport) {
        let params = ResolventParams::default();
        for (i, b) in self.b_maps.iter().enumerate() {
            match b.resolvent(&params).and_then(|j| j.residual(x)) {
                Ok(r) if r > CERTIFICATION_TOL => report.push(
                    "certified_solution",
                    format!("primal residual {r:.6e} for mappings.b[{i}] exceeds {CERTIFICATION_TOL:e}"),
                ),
                Ok(_) => {}
                Err(e) => report.push("certified_solution", format!("mappings.b[{i}]: {e}")),
            }
        }
        for (j, (f, a)) in self.f_maps.iter().zip(&self.a_ops).enumerate() {
            let ax = a.apply_unchecked(x);
            match f.resolvent(&params).and_then(|jf| jf.residual(&ax)) {
                Ok(r) if r > CERTIFICATION_TOL => report.push(
                    "certified_solution",
                    format!("image residual {r:.6e} for mappings.f[{j}] exceeds {CERTIFICATION_TOL:e}"),
                ),
                Ok(_) => {}
                Err(e) => report.push("certified_solution", format!("mappings.f[{j}]: {e}")),
            }
        }
    }

    /// Primal and image residuals at `x` for resolvent parameter `params`.
    pub fn residuals(&self, params: &ResolventParams, x: &Vector) -> Result<Residuals, MappingError> {
        let mut primal: f64 = 0.0;
        for b in &self.b_maps {
            primal = primal.max(b.resolvent(params)?.residual(x)?);
        }
        let mut image: f64 = 0.0;
        for (f, a) in self.f_maps.iter().zip(&self.a_ops) {
            image = image.max(f.resolvent(params)?.residual(&a.apply(x)?)?);
        }
        Ok(Residuals { primal, image })
    }

    /// Rewrites a `(p, r)` instance as a two-mapping instance on the product
    /// space: `B = 0` on the domain, `F = B₁ × … × B_p × F₁ × … × F_r`, and
    /// `A x = (x, …, x, A₁x, …, A_r x)`. Both have the same solutions.
    pub fn lift_to_product(&self) -> Result<ScnppInstance, ValidationReport> {
        self.structural_report().into_result()?;
        let parts: Vec<MonotoneMap> = self.b_maps.iter().chain(&self.f_maps).cloned().collect();
        let lifted_op = LinearOp::lift(self.p(), &self.a_ops, self.n1)
            .expect("column counts checked by validation");
        Ok(ScnppInstance {
            n1: self.n1,
            b_maps: vec![MonotoneMap::zero(self.n1).with_odd(true)],
            f_maps: vec![MonotoneMap::product(parts)],
            a_ops: vec![lifted_op],
            certified_solution: self.certified_solution.clone(),
            certified_empty: self.certified_empty,
        })
    }

    /// Projection of `x0` onto the solution set when every mapping is the
    /// zero map or the normal cone of an affine set, in which case the
    /// solution set is itself affine. `None` otherwise, or when the stacked
    /// system is inconsistent.
    pub fn affine_nearest_solution(&self, x0: &Vector) -> Option<Vector> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        for b in &self.b_maps {
            match &b.kind {
                MapKind::Zero { .. } => {}
                MapKind::NormalCone(ConvexSet::Affine(s)) => {
                    let e = s.matrix();
                    for i in 0..e.rows() {
                        rows.push(e.row(i).to_vec());
                        rhs.push(s.rhs()[i]);
                    }
                }
                _ => return None,
            }
        }
        for (f, a) in self.f_maps.iter().zip(&self.a_ops) {
            match &f.kind {
                MapKind::Zero { .. } => {}
                MapKind::NormalCone(ConvexSet::Affine(s)) => {
                    let e = s.matrix();
                    for i in 0..e.rows() {
                        let row: Vec<f64> = (0..self.n1)
                            .map(|c| (0..a.rows()).map(|k| e.get(i, k) * a.get(k, c)).sum())
                            .collect();
                        rows.push(row);
                        rhs.push(s.rhs()[i]);
                    }
                }
                _ => return None,
            }
        }
        if rows.is_empty() {
            return Some(x0.clone());
        }
        let m = rows.len();
        let e = LinearOp::new(m, self.n1, rows.concat()).ok()?;
        let set = ConvexSet::affine(e, rhs).ok()?;
        if !set.violations().is_empty() {
            return None;
        }
        set.project(x0).ok()
    }
}

/// Instance for a split variational inequality: `B₁ = G(·) + c + N_C` on the
/// domain, and the given image-side mapping through `a`. A zero `G` and `c`
/// collapse `B₁` to the plain normal cone of `C`.
pub fn svip_instance(
    g: LinearOp,
    c: Vector,
    set: ConvexSet,
    f_side: MonotoneMap,
    a: LinearOp,
) -> Result<ScnppInstance, ValidationReport> {
    let b = if g.is_zero() && c.iter().all(|v| *v == 0.0) {
        MonotoneMap::normal_cone(set)
    } else {
        MonotoneMap::affine_vi(g, c, set)
    };
    let inst = ScnppInstance::two_mapping(b, f_side, a);
    inst.validate()?;
    Ok(inst)
}

/// Multiple-set split feasibility: `x ∈ ∩ C_i` and `A_j x ∈ Q_j`, written
/// with normal cones.
pub fn feasibility_instance(
    sets_c: Vec<ConvexSet>,
    sets_q: Vec<ConvexSet>,
    a_ops: Vec<LinearOp>,
) -> Result<ScnppInstance, ValidationReport> {
    let n1 = sets_c
        .first()
        .map(ConvexSet::dim)
        .or_else(|| a_ops.first().map(LinearOp::cols))
        .unwrap_or(0);
    let inst = ScnppInstance {
        n1,
        b_maps: sets_c.into_iter().map(MonotoneMap::normal_cone).collect(),
        f_maps: sets_q.into_iter().map(MonotoneMap::normal_cone).collect(),
        a_ops,
        certified_solution: None,
        certified_empty: None,
    };
    inst.validate()?;
    Ok(inst)
}

/// `{B = N_[0,1], F = N_[2,3], A = 2}` on the real line; the only solution is 1.
pub fn canonical_instance() -> ScnppInstance {
    ScnppInstance::two_mapping(
        MonotoneMap::normal_cone(ConvexSet::boxed([0.0], [1.0])),
        MonotoneMap::normal_cone(ConvexSet::boxed([2.0], [3.0])),
        LinearOp::from_rows(&[&[2.0]]),
    )
    .with_solution([1.0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_instance_is_valid() {
        canonical_instance().validate().unwrap();
    }

    #[test]
    fn wrong_columns_name_the_operator() {
        let mut inst = canonical_instance();
        inst.a_ops[0] = LinearOp::from_rows(&[&[2.0, 1.0]]);
        let report = inst.validate().unwrap_err();
        assert!(report
            .violations
            .iter()
            .any(|v| v.location == "operators.a[0]" && v.message.contains("2 columns")));
    }

    #[test]
    fn bad_certificate_reports_image_residual() {
        let inst = canonical_instance().with_solution([0.5]);
        let report = inst.validate().unwrap_err();
        assert_eq!(report.violations.len(), 1);
        let msg = &report.violations[0].message;
        assert!(msg.contains("image residual 1.000000e0"), "{msg}");
    }

    #[test]
    fn all_violations_are_collected() {
        let inst = ScnppInstance {
            n1: 2,
            b_maps: vec![
                MonotoneMap::normal_cone(ConvexSet::boxed([1.0, 0.0], [0.0, 1.0])),
                MonotoneMap::subdiff_l1(3, -1.0),
            ],
            f_maps: vec![MonotoneMap::zero(1)],
            a_ops: vec![LinearOp::from_rows(&[&[1.0]])],
            certified_solution: None,
            certified_empty: None,
        };
        let report = inst.validate().unwrap_err();
        // inverted box, l1 dimension, l1 weight, operator columns
        assert_eq!(report.violations.len(), 4, "{report}");
    }

    #[test]
    fn empty_instance_is_rejected() {
        let inst = ScnppInstance {
            n1: 1,
            b_maps: vec![],
            f_maps: vec![],
            a_ops: vec![],
            certified_solution: None,
            certified_empty: None,
        };
        assert!(inst.validate().is_err());
        assert!(inst.lift_to_product().is_err());
    }

    #[test]
    fn lift_of_single_domain_mapping() {
        let inst = ScnppInstance {
            n1: 1,
            b_maps: vec![MonotoneMap::normal_cone(ConvexSet::boxed([0.0], [1.0]))],
            f_maps: vec![],
            a_ops: vec![],
            certified_solution: None,
            certified_empty: None,
        };
        let lifted = inst.lift_to_product().unwrap();
        assert!(lifted.is_two_mapping());
        assert_eq!(lifted.a_ops[0], LinearOp::identity(1));
        lifted.validate().unwrap();
    }

    #[test]
    fn lift_of_canonical_has_expected_norm() {
        let lifted = canonical_instance().lift_to_product().unwrap();
        assert_eq!(lifted.a_ops[0], LinearOp::from_rows(&[&[1.0], &[2.0]]));
        let l = lifted.a_ops[0].gram_norm_default().estimate;
        assert!((l - 5.0).abs() < 1e-9);
        lifted.validate().unwrap();
    }

    #[test]
    fn svip_examples() {
        let unit = ConvexSet::boxed([0.0], [1.0]);
        let inst = svip_instance(
            LinearOp::zeros(1, 1),
            Vector::from([0.0]),
            unit.clone(),
            MonotoneMap::zero(1),
            LinearOp::identity(1),
        )
        .unwrap();
        assert!(matches!(inst.b_maps[0].kind, MapKind::NormalCone(_)));

        let unbounded = svip_instance(
            LinearOp::identity(1),
            Vector::from([-1.0]),
            ConvexSet::boxed([f64::NEG_INFINITY], [f64::INFINITY]),
            MonotoneMap::zero(1),
            LinearOp::identity(1),
        )
        .unwrap_err();
        assert!(unbounded.to_string().contains("affine_monotone"), "{unbounded}");

        let halfline = ConvexSet::halfspace([-1.0], 0.0);
        let inst = svip_instance(
            LinearOp::identity(1),
            Vector::from([1.0]),
            halfline,
            MonotoneMap::zero(1),
            LinearOp::identity(1),
        )
        .unwrap()
        .with_solution([0.0]);
        inst.validate().unwrap();
    }

    #[test]
    fn feasibility_examples() {
        let inst = feasibility_instance(
            vec![ConvexSet::boxed([0.0], [1.0])],
            vec![ConvexSet::boxed([2.0], [3.0])],
            vec![LinearOp::from_rows(&[&[2.0]])],
        )
        .unwrap();
        assert_eq!(inst.with_solution([1.0]), canonical_instance());

        let ball = ConvexSet::ball([0.0, 0.0], 1.0);
        let inst = feasibility_instance(vec![ball.clone()], vec![ball], vec![LinearOp::identity(2)])
            .unwrap();
        let params = ResolventParams::default();
        let r = inst.residuals(&params, &Vector::from([0.6, -0.7])).unwrap();
        assert_eq!(r.max(), 0.0);

        let empty = feasibility_instance(
            vec![ConvexSet::boxed([0.0], [1.0])],
            vec![ConvexSet::boxed([5.0], [6.0])],
            vec![LinearOp::identity(1)],
        )
        .unwrap()
        .with_certified_empty();
        assert!(empty.is_certified_empty());
        empty.validate().unwrap();
    }

    #[test]
    fn affine_nearest_solution_projects_onto_stacked_system() {
        // x1 + x2 = 2 on the domain, and (x1 - x2) = 0 through A = I.
        let b = MonotoneMap::normal_cone(
            ConvexSet::affine(LinearOp::from_rows(&[&[1.0, 1.0]]), [2.0]).unwrap(),
        );
        let f = MonotoneMap::normal_cone(
            ConvexSet::affine(LinearOp::from_rows(&[&[1.0, -1.0]]), [0.0]).unwrap(),
        );
        let inst = ScnppInstance::two_mapping(b, f, LinearOp::identity(2));
        let p = inst.affine_nearest_solution(&Vector::from([5.0, -3.0])).unwrap();
        assert!(p.dist(&Vector::from([1.0, 1.0])) < 1e-12);
        assert!(canonical_instance()
            .affine_nearest_solution(&Vector::from([0.0]))
            .is_none());
    }
}
