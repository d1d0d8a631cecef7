//! Seeded random instance families shared by the benchmarks and the
//! acceptance suite.
//!
//! Every generator builds its instance around a point chosen first, so the
//! solution set is known to be nonempty and that point is attached as the
//! certified solution.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use scnpp::linops::{LinearOp, Vector};
use scnpp::mappings::{ConvexSet, MonotoneMap};
use scnpp::problems::ScnppInstance;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn uniform_vector(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vector {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect::<Vec<f64>>().into()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> LinearOp {
    let data = (0..rows * cols).map(|_| rng.gen_range(-scale..scale)).collect();
    LinearOp::new(rows, cols, data).expect("shape")
}

fn unit_vector(rng: &mut impl Rng, n: usize) -> Vector {
    loop {
        let v = uniform_vector(rng, n, -1.0, 1.0);
        let nrm = v.norm();
        if nrm > 0.1 {
            return v.scale(1.0 / nrm);
        }
    }
}

/// A box or halfspace containing `u`.
pub fn set_containing(rng: &mut impl Rng, u: &Vector) -> ConvexSet {
    let n = u.dim();
    if rng.gen_bool(0.5) {
        let lo = u.add_scaled(-1.0, &uniform_vector(rng, n, 0.05, 1.0));
        let hi = u.add_scaled(1.0, &uniform_vector(rng, n, 0.05, 1.0));
        ConvexSet::boxed(lo, hi)
    } else {
        let a = unit_vector(rng, n);
        let slack = rng.gen_range(0.0..0.5);
        ConvexSet::halfspace(a.clone(), a.dot(u) + slack)
    }
}

/// Split feasibility in R^n with `p, r ∈ {1, 2}` boxes and halfspaces
/// sharing a common point.
pub fn random_feasibility(rng: &mut impl Rng, n: usize) -> ScnppInstance {
    let u = uniform_vector(rng, n, -1.0, 1.0);
    let p = rng.gen_range(1..=2);
    let r = rng.gen_range(1..=2);
    let b_maps = (0..p)
        .map(|_| MonotoneMap::normal_cone(set_containing(rng, &u)))
        .collect();
    let mut a_ops = Vec::new();
    let mut f_maps = Vec::new();
    for _ in 0..r {
        let m = rng.gen_range(2..=n);
        let a = random_matrix(rng, m, n, 1.0);
        let au = a.apply(&u).expect("dims");
        f_maps.push(MonotoneMap::normal_cone(set_containing(rng, &au)));
        a_ops.push(a);
    }
    ScnppInstance {
        n1: n,
        b_maps,
        f_maps,
        a_ops,
        certified_solution: Some(u),
        certified_empty: None,
    }
}

/// Two-mapping instance with odd mappings (symmetric boxes, centred balls,
/// ℓ₁ subdifferentials); the origin is always a solution.
pub fn random_odd(rng: &mut impl Rng, n: usize) -> ScnppInstance {
    let m = rng.gen_range(2..=n);
    let a = random_matrix(rng, m, n, 1.0);
    let b = match rng.gen_range(0..3) {
        0 => {
            let h = uniform_vector(rng, n, 0.1, 1.0);
            MonotoneMap::normal_cone(ConvexSet::boxed(-&h, h))
        }
        1 => MonotoneMap::normal_cone(ConvexSet::ball(Vector::zeros(n), rng.gen_range(0.2..1.0))),
        _ => MonotoneMap::subdiff_l1(n, rng.gen_range(0.1..1.0)),
    };
    let f = if rng.gen_bool(0.5) {
        let h = uniform_vector(rng, m, 0.1, 1.0);
        MonotoneMap::normal_cone(ConvexSet::boxed(-&h, h))
    } else {
        MonotoneMap::normal_cone(ConvexSet::ball(Vector::zeros(m), rng.gen_range(0.2..1.0)))
    };
    ScnppInstance::two_mapping(b.with_odd(true), f.with_odd(true), a).with_solution(Vector::zeros(n))
}

/// Strongly monotone `G = I + K` (with `K` skew) so `Gv + c` has one zero.
pub fn strongly_monotone_matrix(rng: &mut impl Rng, n: usize) -> LinearOp {
    let k = random_matrix(rng, n, n, 0.5);
    let data = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let skew = k.get(i, j) - k.get(j, i);
            skew + if i == j { 1.0 } else { 0.0 }
        })
        .collect();
    LinearOp::new(n, n, data).expect("shape")
}

/// Two-mapping instance with exactly one solution: the domain mapping is
/// strongly monotone (affine, or an affine variational inequality over a
/// box with the solution on its boundary), the image side a box or
/// halfspace containing `A x*`.
pub fn random_unique(rng: &mut impl Rng, n: usize) -> ScnppInstance {
    let x_star = uniform_vector(rng, n, -1.0, 1.0);
    let g = strongly_monotone_matrix(rng, n);
    let gx = g.apply(&x_star).expect("dims");
    let b = if rng.gen_bool(0.5) {
        MonotoneMap::affine(g, -&gx)
    } else {
        // Put x* on the upper face in coordinate 0 and pick c so that
        // −(Gx* + c) is an outward normal there.
        let mut lo = x_star.add_scaled(-1.0, &uniform_vector(rng, n, 0.2, 1.0)).into_inner();
        let mut hi = x_star.add_scaled(1.0, &uniform_vector(rng, n, 0.2, 1.0)).into_inner();
        hi[0] = x_star[0];
        lo[0] = lo[0].min(x_star[0] - 0.2);
        let mut normal = vec![0.0; n];
        normal[0] = rng.gen_range(0.1..1.0);
        let c = &(-&gx) - &Vector::from(normal);
        MonotoneMap::affine_vi(g, c, ConvexSet::boxed(lo, hi))
    };
    let m = rng.gen_range(2..=n);
    let a = random_matrix(rng, m, n, 1.0);
    let ax = a.apply(&x_star).expect("dims");
    let f = MonotoneMap::normal_cone(set_containing(rng, &ax));
    ScnppInstance::two_mapping(b, f, a).with_solution(x_star)
}

/// Two-mapping box/ball/halfspace instance with a common point.
pub fn random_pair(rng: &mut impl Rng, n: usize) -> ScnppInstance {
    let u = uniform_vector(rng, n, -1.0, 1.0);
    let b = if rng.gen_bool(0.3) {
        let r = rng.gen_range(0.2..1.0);
        MonotoneMap::normal_cone(ConvexSet::ball(u.add_scaled(r * 0.5, &unit_vector(rng, n)), r))
    } else {
        MonotoneMap::normal_cone(set_containing(rng, &u))
    };
    let m = rng.gen_range(1..=n);
    let a = random_matrix(rng, m, n, 1.0);
    let au = a.apply(&u).expect("dims");
    let f = MonotoneMap::normal_cone(set_containing(rng, &au));
    ScnppInstance::two_mapping(b, f, a).with_solution(u)
}

/// One mapping of every catalog kind in R^n, each paired with a label. Kinds
/// that admit it are generated in their odd form and flagged.
pub fn catalog(rng: &mut impl Rng, n: usize) -> Vec<(&'static str, MonotoneMap)> {
    let center = uniform_vector(rng, n, -1.0, 1.0);
    let h = uniform_vector(rng, n, 0.1, 1.5);
    let e = random_matrix(rng, n.saturating_sub(1).max(1), n, 1.0);
    let d = uniform_vector(rng, e.rows(), -1.0, 1.0);
    let g = strongly_monotone_matrix(rng, n);
    let c = uniform_vector(rng, n, -1.0, 1.0);
    let small_g = g.scale(0.3);
    let box_set = ConvexSet::boxed(center.add_scaled(-1.0, &h), center.add_scaled(1.0, &h));
    vec![
        ("zero", MonotoneMap::zero(n).with_odd(true)),
        ("normal_cone_box", MonotoneMap::normal_cone(box_set.clone())),
        ("normal_cone_box_odd", MonotoneMap::normal_cone(ConvexSet::boxed(-&h, h.clone())).with_odd(true)),
        ("normal_cone_ball", MonotoneMap::normal_cone(ConvexSet::ball(center.clone(), 0.7))),
        (
            "normal_cone_ball_odd",
            MonotoneMap::normal_cone(ConvexSet::ball(Vector::zeros(n), 0.7)).with_odd(true),
        ),
        ("normal_cone_halfspace", MonotoneMap::normal_cone(ConvexSet::halfspace(unit_vector(rng, n), 0.3))),
        (
            "normal_cone_affine",
            MonotoneMap::normal_cone(ConvexSet::affine(e.clone(), d).expect("dims")),
        ),
        (
            "normal_cone_affine_odd",
            MonotoneMap::normal_cone(ConvexSet::affine(e, Vector::zeros(n.saturating_sub(1).max(1))).expect("dims"))
                .with_odd(true),
        ),
        ("subdiff_l1", MonotoneMap::subdiff_l1(n, rng.gen_range(0.1..1.5)).with_odd(true)),
        ("affine_monotone", MonotoneMap::affine(g.clone(), c.clone())),
        ("affine_monotone_odd", MonotoneMap::affine(g.clone(), Vector::zeros(n)).with_odd(true)),
        ("affine_vi_contraction", MonotoneMap::affine_vi(small_g, c.clone(), box_set.clone())),
        ("affine_vi_splitting", MonotoneMap::affine_vi(g.scale(2.0), c, box_set.clone())),
        (
            "product",
            MonotoneMap::product(vec![MonotoneMap::normal_cone(box_set), MonotoneMap::subdiff_l1(n, 0.5)]),
        ),
    ]
}
