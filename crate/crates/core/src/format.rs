//! On-disk formats.
//!
//! Instances are TOML documents:
//!
//! ```toml
//! certified_solution = [1.0]      # optional, checked to 1e-9 at load
//! certified_empty = false         # optional
//!
//! [space]
//! n1 = 1
//!
//! [[mappings.b]]
//! kind = "normal_cone_box"
//! lo = [0.0]
//! hi = [1.0]
//!
//! [[mappings.f]]
//! kind = "normal_cone_box"
//! lo = [2.0]
//! hi = [3.0]
//! odd = false                     # optional, default false
//!
//! [[operators.a]]
//! rows = 1
//! cols = 1
//! data = [2.0]                    # row-major
//! ```
//!
//! Mapping kinds and their keys:
//!
//! | kind                    | keys                                   |
//! |-------------------------|----------------------------------------|
//! | `zero`                  | `dim` (optional)                       |
//! | `normal_cone_box`       | `lo`, `hi` (finite)                    |
//! | `normal_cone_ball`      | `center`, `radius`                     |
//! | `normal_cone_halfspace` | `a`, `b` for `{v : ⟨a, v⟩ ≤ b}`        |
//! | `normal_cone_affine`    | `e` (matrix table), `d` for `{E v = d}`|
//! | `subdiff_l1`            | `weight`, `dim` (optional)             |
//! | `affine_monotone`       | `g` (matrix table), `c`                |
//! | `affine_vi`             | `g`, `c`, `set` (table with `kind` = `box`, `ball`, `halfspace` or `affine`) |
//!
//! A missing `dim` defaults to `n1` for domain mappings and to the row count
//! of the matching operator for image mappings. Tolerances in the solver are
//! absolute, so the scale of the data sets the meaning of `tol`.
//!
//! Traces are CSV: a header `k,primal_residual,image_residual,step_norm`
//! optionally followed by `x_0..x_{n-1}`, one row per recorded iteration,
//! then `#`-prefixed summary lines (`status`, `iterations_used`,
//! `final_point`). Floats use 17 significant digits.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linops::{LinearOp, Vector};
use crate::mappings::{ConvexSet, MapKind, MonotoneMap};
use crate::problems::{ScnppInstance, ValidationReport, Violation};
use crate::schemes::{RunStatus, RunTrace};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(ValidationReport),
    #[error("cannot serialize: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_solution: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_empty: Option<bool>,
    pub space: SpaceSection,
    #[serde(default)]
    pub mappings: MappingsSection,
    #[serde(default)]
    pub operators: OperatorsSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceSection {
    pub n1: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MappingsSection {
    #[serde(default)]
    pub b: Vec<MappingEntry>,
    #[serde(default)]
    pub f: Vec<MappingEntry>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OperatorsSection {
    #[serde(default)]
    pub a: Vec<MatrixEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MappingEntry {
    #[serde(flatten)]
    pub kind: KindEntry,
    #[serde(default)]
    pub odd: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KindEntry {
    Zero {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    NormalConeBox { lo: Vec<f64>, hi: Vec<f64> },
    NormalConeBall { center: Vec<f64>, radius: f64 },
    NormalConeHalfspace { a: Vec<f64>, b: f64 },
    NormalConeAffine { e: MatrixEntry, d: Vec<f64> },
    SubdiffL1 {
        weight: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    AffineMonotone { g: MatrixEntry, c: Vec<f64> },
    AffineVi { g: MatrixEntry, c: Vec<f64>, set: SetEntry },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetEntry {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Halfspace { a: Vec<f64>, b: f64 },
    Affine { e: MatrixEntry, d: Vec<f64> },
}

struct Builder {
    report: ValidationReport,
}

impl Builder {
    fn fail(&mut self, location: &str, message: String) {
        self.report.violations.push(Violation {
            location: location.to_string(),
            message,
        });
    }

    fn matrix(&mut self, loc: &str, m: &MatrixEntry) -> Option<LinearOp> {
        match LinearOp::new(m.rows, m.cols, m.data.clone()) {
            Ok(op) => Some(op),
            Err(e) => {
                self.fail(loc, e.to_string());
                None
            }
        }
    }

    fn set(&mut self, loc: &str, s: &SetEntry) -> Option<ConvexSet> {
        Some(match s {
            SetEntry::Box { lo, hi } => ConvexSet::boxed(lo.clone(), hi.clone()),
            SetEntry::Ball { center, radius } => ConvexSet::ball(center.clone(), *radius),
            SetEntry::Halfspace { a, b } => ConvexSet::halfspace(a.clone(), *b),
            SetEntry::Affine { e, d } => {
                let e = self.matrix(loc, e)?;
                match ConvexSet::affine(e, d.clone()) {
                    Ok(s) => s,
                    Err(err) => {
                        self.fail(loc, err.to_string());
                        return None;
                    }
                }
            }
        })
    }

    fn mapping(&mut self, loc: &str, entry: &MappingEntry, default_dim: Option<usize>) -> Option<MonotoneMap> {
        let dim = |d: &Option<usize>, b: &mut Builder| match d.or(default_dim) {
            Some(d) => Some(d),
            None => {
                b.fail(loc, "dimension missing and cannot be inferred".into());
                None
            }
        };
        let kind = match &entry.kind {
            KindEntry::Zero { dim: d } => MapKind::Zero { dim: dim(d, self)? },
            KindEntry::NormalConeBox { lo, hi } => {
                MapKind::NormalCone(ConvexSet::boxed(lo.clone(), hi.clone()))
            }
            KindEntry::NormalConeBall { center, radius } => {
                MapKind::NormalCone(ConvexSet::ball(center.clone(), *radius))
            }
            KindEntry::NormalConeHalfspace { a, b } => {
                MapKind::NormalCone(ConvexSet::halfspace(a.clone(), *b))
            }
            KindEntry::NormalConeAffine { e, d } => MapKind::NormalCone(self.set(
                loc,
                &SetEntry::Affine {
                    e: e.clone(),
                    d: d.clone(),
                },
            )?),
            KindEntry::SubdiffL1 { weight, dim: d } => MapKind::SubdiffL1 {
                dim: dim(d, self)?,
                weight: *weight,
            },
            KindEntry::AffineMonotone { g, c } => MapKind::AffineMonotone {
                g: self.matrix(loc, g)?,
                c: c.clone().into(),
            },
            KindEntry::AffineVi { g, c, set } => MapKind::AffineVi {
                g: self.matrix(loc, g)?,
                c: c.clone().into(),
                set: self.set(loc, set)?,
            },
        };
        Some(MonotoneMap {
            kind,
            odd: entry.odd,
        })
    }
}

impl InstanceFile {
    /// Converts to an instance. Shape errors in matrices are collected; the
    /// instance is not otherwise validated.
    pub fn to_instance(&self) -> Result<ScnppInstance, ValidationReport> {
        let mut b = Builder {
            report: ValidationReport::default(),
        };
        let n1 = self.space.n1;
        let a_ops: Vec<Option<LinearOp>> = self
            .operators
            .a
            .iter()
            .enumerate()
            .map(|(j, m)| b.matrix(&format!("operators.a[{j}]"), m))
            .collect();
        let b_maps: Vec<Option<MonotoneMap>> = self
            .mappings
            .b
            .iter()
            .enumerate()
            .map(|(i, e)| b.mapping(&format!("mappings.b[{i}]"), e, Some(n1)))
            .collect();
        let f_maps: Vec<Option<MonotoneMap>> = self
            .mappings
            .f
            .iter()
            .enumerate()
            .map(|(j, e)| {
                let rows = self.operators.a.get(j).map(|m| m.rows);
                b.mapping(&format!("mappings.f[{j}]"), e, rows)
            })
            .collect();
        if !b.report.is_empty() {
            return Err(b.report);
        }
        Ok(ScnppInstance {
            n1,
            b_maps: b_maps.into_iter().flatten().collect(),
            f_maps: f_maps.into_iter().flatten().collect(),
            a_ops: a_ops.into_iter().flatten().collect(),
            certified_solution: self.certified_solution.clone().map(Vector::from),
            certified_empty: self.certified_empty,
        })
    }

    pub fn from_instance(inst: &ScnppInstance) -> Result<Self, FormatError> {
        let entry = |m: &MonotoneMap| -> Result<MappingEntry, FormatError> {
            Ok(MappingEntry {
                kind: kind_entry(m)?,
                odd: m.odd,
            })
        };
        Ok(InstanceFile {
            certified_solution: inst.certified_solution.clone().map(Vector::into_inner),
            certified_empty: inst.certified_empty,
            space: SpaceSection { n1: inst.n1 },
            mappings: MappingsSection {
                b: inst.b_maps.iter().map(entry).collect::<Result<_, _>>()?,
                f: inst.f_maps.iter().map(entry).collect::<Result<_, _>>()?,
            },
            operators: OperatorsSection {
                a: inst.a_ops.iter().map(matrix_entry).collect(),
            },
        })
    }
}

fn matrix_entry(op: &LinearOp) -> MatrixEntry {
    MatrixEntry {
        rows: op.rows(),
        cols: op.cols(),
        data: op.data().to_vec(),
    }
}

fn set_entry(s: &ConvexSet) -> SetEntry {
    match s {
        ConvexSet::Box { lo, hi } => SetEntry::Box {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
        },
        ConvexSet::Ball { center, radius } => SetEntry::Ball {
            center: center.to_vec(),
            radius: *radius,
        },
        ConvexSet::Halfspace { normal, offset } => SetEntry::Halfspace {
            a: normal.to_vec(),
            b: *offset,
        },
        ConvexSet::Affine(a) => SetEntry::Affine {
            e: matrix_entry(a.matrix()),
            d: a.rhs().to_vec(),
        },
    }
}

fn kind_entry(m: &MonotoneMap) -> Result<KindEntry, FormatError> {
    Ok(match &m.kind {
        MapKind::Zero { dim } => KindEntry::Zero { dim: Some(*dim) },
        MapKind::NormalCone(s) => match set_entry(s) {
            SetEntry::Box { lo, hi } => KindEntry::NormalConeBox { lo, hi },
            SetEntry::Ball { center, radius } => KindEntry::NormalConeBall { center, radius },
            SetEntry::Halfspace { a, b } => KindEntry::NormalConeHalfspace { a, b },
            SetEntry::Affine { e, d } => KindEntry::NormalConeAffine { e, d },
        },
        MapKind::SubdiffL1 { dim, weight } => KindEntry::SubdiffL1 {
            weight: *weight,
            dim: Some(*dim),
        },
        MapKind::AffineMonotone { g, c } => KindEntry::AffineMonotone {
            g: matrix_entry(g),
            c: c.to_vec(),
        },
        MapKind::AffineVi { g, c, set } => KindEntry::AffineVi {
            g: matrix_entry(g),
            c: c.to_vec(),
            set: set_entry(set),
        },
        MapKind::Product(_) => {
            return Err(FormatError::Unsupported(
                "product mappings only arise from lifting and have no file form".into(),
            ))
        }
    })
}

/// Parses a TOML instance document. The result is not yet validated; call
/// [`ScnppInstance::validate`].
pub fn parse_instance(text: &str) -> Result<ScnppInstance, FormatError> {
    let file: InstanceFile = toml::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))?;
    file.to_instance().map_err(FormatError::Invalid)
}

pub fn instance_to_toml(inst: &ScnppInstance) -> Result<String, FormatError> {
    let file = InstanceFile::from_instance(inst)?;
    toml::to_string(&file).map_err(|e| FormatError::Unsupported(e.to_string()))
}

/// Fixed 17-significant-digit rendering used in traces.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Writes `trace` as CSV. Iterate columns are included when `with_iterates`.
pub fn write_trace<W: Write>(trace: &RunTrace, with_iterates: bool, mut w: W) -> io::Result<()> {
    let n = trace.final_point.dim();
    write!(w, "k,primal_residual,image_residual,step_norm")?;
    if with_iterates {
        for i in 0..n {
            write!(w, ",x_{i}")?;
        }
    }
    writeln!(w)?;
    for (row, (_, x)) in trace.history.iter().zip(&trace.iterates) {
        write!(
            w,
            "{},{},{},{}",
            row.k,
            fmt_f64(row.primal_residual),
            fmt_f64(row.image_residual),
            fmt_f64(row.step_norm)
        )?;
        if with_iterates {
            for v in x.iter() {
                write!(w, ",{}", fmt_f64(*v))?;
            }
        }
        writeln!(w)?;
    }
    writeln!(w, "# algorithm,{}", trace.algorithm)?;
    writeln!(w, "# status,{}", trace.status.label())?;
    if let RunStatus::Breakdown(reason) = &trace.status {
        writeln!(w, "# reason,{}", reason.replace(['\n', ','], " "))?;
    }
    writeln!(w, "# iterations_used,{}", trace.iterations_used)?;
    write!(w, "# final_point")?;
    for v in trace.final_point.iter() {
        write!(w, ",{}", fmt_f64(*v))?;
    }
    writeln!(w)?;
    Ok(())
}
