//! Closed-form projection onto the intersection of two halfspaces.

use crate::linops::Vector;

const RHO_REL_TOL: f64 = 1e-14;
const PI_REL_TOL: f64 = 1e-12;

/// `T(x, y, z)`: the projection of `x` onto `H(x, y) ∩ H(y, z)`, where
/// `H(a, b) = { u : ⟨u − b, a − b⟩ ≤ 0 }`.
///
/// With `π = ⟨x−y, y−z⟩`, `μ = ‖x−y‖²`, `ν = ‖y−z‖²` and `ρ = μν − π²`:
///
/// - `ρ = 0, π ≥ 0`: `z`
/// - `ρ > 0, πν ≥ ρ`: `x + (1 + π/ν)(z − y)`
/// - `ρ > 0, πν < ρ`: `y + (ν/ρ)(π(x − y) + μ(z − y))`
///
/// `ρ` is a Gram determinant and loses all its digits near collinearity, so
/// the zero tests are relative to `μν`. The remaining case `ρ = 0, π < 0`
/// means the two halfspaces are parallel and disjoint; it is returned as an
/// error.
pub fn haugazeau_t(x: &Vector, y: &Vector, z: &Vector) -> Result<Vector, InconsistentHalfspaces> {
    let mut out = vec![0.0; x.dim()];
    haugazeau_t_into(x, y, z, &mut out)?;
    Ok(out.into())
}

/// [`haugazeau_t`] writing into `out`; lengths are not checked.
pub(crate) fn haugazeau_t_into(
    x: &[f64],
    y: &[f64],
    z: &[f64],
    out: &mut [f64],
) -> Result<(), InconsistentHalfspaces> {
    let (mut pi, mut mu, mut nu) = (0.0, 0.0, 0.0);
    for ((xi, yi), zi) in x.iter().zip(y).zip(z) {
        let (xy, yz) = (xi - yi, yi - zi);
        pi += xy * yz;
        mu += xy * xy;
        nu += yz * yz;
    }
    let scale = mu * nu;
    let rho = scale - pi * pi;

    if rho <= RHO_REL_TOL * scale {
        if pi < -PI_REL_TOL * scale.sqrt() {
            return Err(InconsistentHalfspaces { pi, rho });
        }
        out.copy_from_slice(z);
    } else if pi * nu >= rho {
        let t = 1.0 + pi / nu;
        for (((o, xi), yi), zi) in out.iter_mut().zip(x).zip(y).zip(z) {
            *o = xi + t * (zi - yi);
        }
    } else {
        let (a, b) = (nu / rho * pi, nu / rho * mu);
        for (((o, xi), yi), zi) in out.iter_mut().zip(x).zip(y).zip(z) {
            *o = yi + a * (xi - yi) + b * (zi - yi);
        }
    }
    Ok(())
}

/// `H(x, y) ∩ H(y, z)` is empty: the normals are antiparallel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InconsistentHalfspaces {
    pub pi: f64,
    pub rho: f64,
}

impl std::fmt::Display for InconsistentHalfspaces {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "inconsistent halfspaces in Haugazeau projection (pi = {:.3e}, rho = {:.3e})",
            self.pi, self.rho
        )
    }
}

impl std::error::Error for InconsistentHalfspaces {}
