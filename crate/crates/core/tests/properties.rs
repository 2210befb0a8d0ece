use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use circumfeas::instances::{gen_ball_pair, gen_ellipsoid_pair, GeneratorConfig};
use circumfeas::linalg::SquareMatrix;
use circumfeas::methods::{run_with, step_ccrm, step_crm, step_map, step_pcrm, step_spm, RunOptions};
use circumfeas::{circumcenter3, ConvexSet64, Ellipsoid64, MethodKind, Point64, StoppingCriterion};

const TOL: f64 = 1e-12;

fn point(n: usize) -> impl Strategy<Value = Point64> {
    prop::collection::vec(-10.0..10.0f64, n).prop_map(|v| Point64::new(v).unwrap())
}

fn sets() -> Vec<ConvexSet64> {
    let p = |v: &[f64]| Point64::new(v.to_vec()).unwrap();
    let a = SquareMatrix::from_rows(&[vec![3.0, 1.0, 0.0], vec![1.0, 2.0, 0.5], vec![0.0, 0.5, 1.0]]).unwrap();
    vec![
        ConvexSet64::halfspace(p(&[1.0, -2.0, 0.5]), 1.0).unwrap(),
        ConvexSet64::hyperplane(p(&[0.0, 1.0, 1.0]), -2.0).unwrap(),
        ConvexSet64::boxed(p(&[-1.0, 0.0, -2.0]), p(&[1.0, 3.0, 2.0])).unwrap(),
        ConvexSet64::ball(p(&[1.0, 1.0, 1.0]), 2.0).unwrap(),
        ConvexSet64::line(p(&[0.0, 1.0, 0.0]), &p(&[1.0, 1.0, 1.0])).unwrap(),
        ConvexSet64::ellipsoid(Ellipsoid64::from_center(a, &p(&[0.5, -1.0, 2.0]), 4.0).unwrap()),
    ]
}

proptest! {
    #[test]
    fn projections_are_firmly_nonexpansive(u in point(3), v in point(3)) {
        for s in sets() {
            let (pu, pv) = (s.project(&u, TOL).unwrap(), s.project(&v, TOL).unwrap());
            let d = &pu - &pv;
            prop_assert!(d.norm_sq() <= d.dot(&(&u - &v)) + 1e-8 * (1.0 + u.dist(&v).powi(2)));
        }
    }

    #[test]
    fn projections_are_idempotent(z in point(3)) {
        for s in sets() {
            let p = s.project(&z, TOL).unwrap();
            prop_assert!(s.project(&p, TOL).unwrap().dist(&p) <= 1e-8 * (1.0 + p.norm()));
        }
    }

    #[test]
    fn projection_satisfies_variational_inequality(z in point(3), w in point(3)) {
        for s in sets() {
            let p = s.project(&z, TOL).unwrap();
            let member = s.project(&w, TOL).unwrap();
            let ip = (&z - &p).dot(&(&member - &p));
            prop_assert!(ip <= 1e-7 * (1.0 + z.norm_sq() + w.norm_sq()), "{s:?}: {ip}");
        }
    }

    #[test]
    fn circumcenter_is_equivariant(z in point(2), v in point(2), w in point(2), shift in point(2), angle in 0.0..std::f64::consts::TAU, scale in 0.1..10.0f64) {
        let base = circumcenter3(&z, &v, &w);
        prop_assume!(!base.is_rank_deficient() && base.center.norm() < 1e4);
        let (c, s) = (angle.cos(), angle.sin());
        let map = |p: &Point64| {
            let q = p.coords();
            Point64::new(vec![scale * (c * q[0] - s * q[1]) + shift[0], scale * (s * q[0] + c * q[1]) + shift[1]]).unwrap()
        };
        let moved = circumcenter3(&map(&z), &map(&v), &map(&w));
        let tol = 1e-8 * (1.0 + scale) * (1.0 + base.center.norm() + shift.norm());
        prop_assert!(moved.center.dist(&map(&base.center)) <= tol);
        for perm in [circumcenter3(&v, &z, &w), circumcenter3(&w, &v, &z), circumcenter3(&v, &w, &z)] {
            prop_assert!(perm.center.dist(&base.center) <= 1e-8 * (1.0 + base.center.norm()));
        }
    }

    #[test]
    fn ccrm_and_map_are_fejer_monotone_on_ball_pairs(seed in 0u64..500, z in point(4)) {
        let (x, y, s) = gen_ball_pair::<f64>(4, seed).unwrap();
        for method in [MethodKind::Ccrm, MethodKind::Map, MethodKind::Spm] {
            let stop = [StoppingCriterion::ProjectionBudget { max: 80 }];
            let run = run_with(method, &x, &y, &z, &stop, &RunOptions::default()).unwrap();
            for w in run.iterates.windows(2) {
                prop_assert!(w[1].dist(&s) <= w[0].dist(&s) + 1e-9 * (1.0 + w[0].dist(&s)));
            }
        }
    }
}

#[test]
fn points_of_the_intersection_are_fixed() {
    for seed in 0..20 {
        let (x, y, s) = gen_ball_pair::<f64>(3, seed).unwrap();
        assert_eq!(step_map(&x, &y, &s, TOL).unwrap(), s);
        assert_eq!(step_spm(&x, &y, &s, TOL).unwrap(), s);
        assert_eq!(step_crm(&x, &y, &s, TOL).unwrap().center, s);
        assert_eq!(step_pcrm(&x, &y, &s, TOL).unwrap().center, s);
        assert_eq!(step_ccrm(&x, &y, &s, TOL).unwrap(), s);
    }
}

#[test]
fn runs_are_reproducible() {
    let cfg = GeneratorConfig::new(15, 2, 1.1, 42);
    let a = gen_ellipsoid_pair(&cfg, 1).unwrap();
    let b = gen_ellipsoid_pair(&cfg, 1).unwrap();
    let stop = [StoppingCriterion::GapToFirstSet { eps: 1e-8 }, StoppingCriterion::ProjectionBudget { max: 2000 }];
    for m in MethodKind::ALL {
        let ra = run_with(m, &a.e1, &a.e2, &a.z0, &stop, &RunOptions::default()).unwrap();
        let rb = run_with(m, &b.e1, &b.e2, &b.z0, &stop, &RunOptions::default()).unwrap();
        assert_eq!(ra.iterates, rb.iterates, "{m}");
        assert_eq!(ra.gaps, rb.gaps);
    }
}

#[test]
fn ccrm_iterates_approach_the_witness_on_overlapping_ellipsoids() {
    let inst = gen_ellipsoid_pair(&GeneratorConfig::new(10, 1, 1.1, 5), 0).unwrap();
    let stop = [StoppingCriterion::GapToFirstSet { eps: 1e-9 }, StoppingCriterion::ProjectionBudget { max: 10_000 }];
    let run = run_with(MethodKind::Ccrm, &inst.e1, &inst.e2, &inst.z0, &stop, &RunOptions::default()).unwrap();
    assert!(run.stop_reason.solved());
    let end = run.final_point();
    assert_abs_diff_eq!(inst.e1.gap(end, TOL).unwrap(), 0.0, epsilon = 1e-9);
    assert!(inst.e2.gap(end, TOL).unwrap() < 1e-6);
}
