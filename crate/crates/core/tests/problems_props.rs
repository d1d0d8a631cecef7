mod common;

use rand::Rng;
use scnpp::linops::{LinearOp, Vector};
use scnpp::mappings::{ConvexSet, MonotoneMap, ResolventParams};
use scnpp::problems::{svip_instance, ScnppInstance};
use scnpp::schemes::{run, Algorithm, SolverConfig};

fn general(r: &mut rand::rngs::StdRng, n: usize) -> ScnppInstance {
    let u = common::vector(r, n, 1.0);
    let p = r.gen_range(1..=3);
    let q = r.gen_range(1..=3);
    let b_maps = (0..p).map(|_| MonotoneMap::normal_cone(common::set_around(r, &u))).collect();
    let mut f_maps = Vec::new();
    let mut a_ops = Vec::new();
    for _ in 0..q {
        let m = r.gen_range(1..=n);
        let a = common::matrix(r, m, n);
        f_maps.push(MonotoneMap::normal_cone(common::set_around(r, &a.apply(&u).unwrap())));
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

#[test]
fn lifted_residual_splits_into_blocks() {
    let mut r = common::rng(21);
    let params = ResolventParams::default();
    for _ in 0..50 {
        let inst = general(&mut r, 4);
        let lifted = inst.lift_to_product().unwrap();
        lifted.validate().unwrap();
        let x = common::vector(&mut r, 4, 3.0);

        let mut blocks = 0.0;
        for b in &inst.b_maps {
            blocks += b.resolvent(&params).unwrap().residual(&x).unwrap().powi(2);
        }
        for (f, a) in inst.f_maps.iter().zip(&inst.a_ops) {
            blocks += f.resolvent(&params).unwrap().residual(&a.apply(&x).unwrap()).unwrap().powi(2);
        }
        let lifted_res = lifted.residuals(&params, &x).unwrap();
        assert_eq!(lifted_res.primal, 0.0);
        assert!((lifted_res.image.powi(2) - blocks).abs() <= 1e-12 * (1.0 + blocks));
    }
}

#[test]
fn lift_preserves_solutions() {
    let mut r = common::rng(22);
    for _ in 0..20 {
        let inst = general(&mut r, 4);
        let x0 = common::vector(&mut r, 4, 3.0);
        let lifted = inst.lift_to_product().unwrap();
        let trace = run(&lifted, &SolverConfig::new(Algorithm::ForwardBackward), &x0).unwrap();
        assert!(trace.is_converged());
        let res = inst.residuals(&ResolventParams::default(), &trace.final_point).unwrap();
        // Each block residual is bounded by the lifted one.
        assert!(res.max() <= 1e-8, "{res:?}");
    }
}

#[test]
fn svip_null_points_solve_the_variational_inequality() {
    let mut r = common::rng(23);
    for _ in 0..10 {
        let n = 4;
        let k = common::matrix(&mut r, n, n);
        let g = LinearOp::new(
            n,
            n,
            (0..n * n)
                .map(|i| {
                    let (a, b) = (i / n, i % n);
                    k.get(a, b) - k.get(b, a) + if a == b { 0.5 } else { 0.0 }
                })
                .collect(),
        )
        .unwrap();
        let c = common::vector(&mut r, n, 2.0);
        let lo = common::vector(&mut r, n, 1.0);
        let hi = lo.add_scaled(1.0, &Vector::filled(n, 1.0));
        let set = ConvexSet::boxed(lo.clone(), hi.clone());
        let a = common::matrix(&mut r, 2, n);
        let inst = svip_instance(g.clone(), c.clone(), set, MonotoneMap::zero(2), a).unwrap();
        let cfg = SolverConfig {
            lambda: 0.5,
            tol: 1e-11,
            ..SolverConfig::new(Algorithm::ForwardBackward)
        };
        let trace = run(&inst, &cfg, &Vector::zeros(n)).unwrap();
        assert!(trace.is_converged(), "{}", trace.status);
        let v = &trace.final_point;
        let field = &g.apply(v).unwrap() + &c;
        for _ in 0..100 {
            let y: Vector = (0..n).map(|i| r.gen_range(lo[i]..hi[i])).collect::<Vec<_>>().into();
            assert!(field.dot(&(&y - v)) >= -1e-8);
        }
    }
}

#[test]
fn halpern_limit_is_close_to_the_anchor_projection_on_affine_instances() {
    let mut r = common::rng(24);
    for _ in 0..5 {
        let u = common::vector(&mut r, 3, 1.0);
        let e = common::matrix(&mut r, 1, 3);
        let a = common::matrix(&mut r, 2, 3);
        let q = common::matrix(&mut r, 1, 2);
        let au = a.apply(&u).unwrap();
        let b = MonotoneMap::normal_cone(ConvexSet::affine(e.clone(), e.apply(&u).unwrap()).unwrap());
        let f = MonotoneMap::normal_cone(ConvexSet::affine(q.clone(), q.apply(&au).unwrap()).unwrap());
        let inst = ScnppInstance::two_mapping(b, f, a).with_solution(u);
        let x0 = common::vector(&mut r, 3, 1.0);
        let nearest = inst.affine_nearest_solution(&x0).unwrap();
        let cfg = SolverConfig {
            tol: 1e-6,
            max_iter: 1_000_000,
            gamma_fraction: 0.9,
            ..SolverConfig::new(Algorithm::Halpern)
        };
        let trace = run(&inst, &cfg, &x0).unwrap();
        // The tail is slow, so the run may stop at the cap; only closeness
        // to the nearest solution is asserted.
        assert!(trace.final_point.dist(&nearest) <= 1e-3, "{}", trace.final_point.dist(&nearest));
    }
}
