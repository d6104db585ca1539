mod common;

use ceqp::{project_halfspace_intersection, ConvexSet, Halfspace, Point};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p(v: &[f64]) -> Point<f64> {
    Point::from_slice(v)
}

fn coords(dim: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, dim)
}

/// One set of every kind in R^dim, built from raw coordinates.
fn any_set(dim: usize) -> impl Strategy<Value = ConvexSet<f64>> {
    let boxed = (coords(dim, 3.0), prop::collection::vec(0.0..2.0f64, dim)).prop_map(|(lo, w)| {
        let hi: Vec<f64> = lo.iter().zip(&w).map(|(l, w)| l + w).collect();
        ConvexSet::boxed(Point::from(lo), Point::from(hi)).unwrap()
    });
    let ball = (coords(dim, 3.0), 0.0..3.0f64).prop_map(|(c, r)| ConvexSet::ball(Point::from(c), r).unwrap());
    let half = (coords(dim, 2.0), -2.0..2.0f64)
        .prop_filter("nonzero normal", |(a, _)| a.iter().any(|v| v.abs() > 1e-3))
        .prop_map(|(a, b)| ConvexSet::halfspace(Point::from(a), b).unwrap());
    let plane = (coords(dim, 2.0), -2.0..2.0f64)
        .prop_filter("nonzero normal", |(a, _)| a.iter().any(|v| v.abs() > 1e-3))
        .prop_map(|(a, b)| ConvexSet::hyperplane(Point::from(a), b).unwrap());
    let poly = (coords(dim, 2.0), prop::collection::vec((coords(dim, 2.0), 0.0..1.0f64), 1..5))
        .prop_filter("nonzero normals", |(_, cs)| cs.iter().all(|(a, _)| a.iter().any(|v| v.abs() > 1e-2)))
        .prop_map(|(w, cs)| {
            let witness = Point::from(w);
            let cuts = cs
                .into_iter()
                .map(|(a, s)| {
                    let a = Point::from(a);
                    let b = a.dot(&witness) + s;
                    Halfspace::new(a, b).unwrap()
                })
                .collect();
            ConvexSet::polyhedron(cuts, witness).unwrap()
        });
    prop_oneof![Just(ConvexSet::WholeSpace), boxed, ball, half, plane, poly]
}

fn set_and_points(k: usize) -> impl Strategy<Value = (ConvexSet<f64>, Vec<Vec<f64>>)> {
    (2usize..6).prop_flat_map(move |dim| (any_set(dim), prop::collection::vec(coords(dim, 6.0), k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn firmly_nonexpansive((set, pts) in set_and_points(2)) {
        let (x, y) = (Point::from(pts[0].clone()), Point::from(pts[1].clone()));
        let (px, py) = (set.project(&x).unwrap(), set.project(&y).unwrap());
        let d = &px - &py;
        prop_assert!(d.dot(&(&x - &y)) >= d.norm_sq() - 1e-10);
    }

    #[test]
    fn three_point_inequality((set, pts) in set_and_points(2)) {
        let inside = set.project(&Point::from(pts[0].clone())).unwrap();
        let y = Point::from(pts[1].clone());
        let py = set.project(&y).unwrap();
        prop_assert!(inside.dist_sq(&py) + py.dist_sq(&y) <= inside.dist_sq(&y) + 1e-10);
    }

    #[test]
    fn variational_characterization((set, pts) in set_and_points(4)) {
        let x = Point::from(pts[0].clone());
        let px = set.project(&x).unwrap();
        for z in &pts[1..] {
            let z = set.project(&Point::from(z.clone())).unwrap();
            prop_assert!((&x - &px).dot(&(&px - &z)) >= -1e-10);
        }
    }

    #[test]
    fn idempotent((set, pts) in set_and_points(1)) {
        let once = set.project(&Point::from(pts[0].clone())).unwrap();
        let twice = set.project(&once).unwrap();
        prop_assert!(once.dist(&twice) <= 1e-12 * (1.0 + once.norm()));
        prop_assert!(set.contains(&once, 1e-9));
    }
}

#[test]
fn projection_examples() {
    let h = ConvexSet::halfspace(p(&[1.0, 0.0]), 0.0).unwrap();
    assert_eq!(h.project(&p(&[1.0, 1.0])).unwrap(), p(&[0.0, 1.0]));
    let ball = ConvexSet::ball(p(&[0.0, 0.0]), 1.0).unwrap();
    assert_eq!(ball.project(&p(&[2.0, 0.0])).unwrap(), p(&[1.0, 0.0]));
    let quadrant = ConvexSet::polyhedron(
        vec![Halfspace::new(p(&[1.0, 0.0]), 0.0).unwrap(), Halfspace::new(p(&[0.0, 1.0]), 0.0).unwrap()],
        p(&[-1.0, -1.0]),
    )
    .unwrap();
    let got = quadrant.project(&p(&[1.0, 1.0])).unwrap();
    let oracle = common::qp_project(&[(vec![1.0, 0.0], 0.0), (vec![0.0, 1.0], 0.0)], &[1.0, 1.0]).unwrap();
    assert!(common::dist(got.as_slice(), &oracle) < 1e-14);
    assert!(got.norm() < 1e-14);
}

#[test]
fn membership_examples() {
    let unit = ConvexSet::boxed(p(&[0.0, 0.0]), p(&[1.0, 1.0])).unwrap();
    assert!(unit.contains(&p(&[0.5, 0.5]), 0.0));
    let h = ConvexSet::halfspace(p(&[1.0, 0.0]), 0.0).unwrap();
    assert!(h.contains(&p(&[1e-9, 0.0]), 1e-8));
    let ball = ConvexSet::ball(p(&[0.0, 0.0]), 1.0).unwrap();
    assert!(!ball.contains(&p(&[1.1, 0.0]), 1e-3));
}

#[test]
fn intersection_examples() {
    let hs = |a: &[f64], b: f64| Halfspace::new(p(a), b).unwrap();
    let x0 = p(&[1.0, 1.0]);
    assert_eq!(project_halfspace_intersection(&[hs(&[1.0, 0.0], 0.0)], &x0, 1e-12).unwrap(), p(&[0.0, 1.0]));
    let z = project_halfspace_intersection(&[hs(&[1.0, 0.0], 0.0), hs(&[0.0, 1.0], 0.0)], &x0, 1e-12).unwrap();
    assert!(z.norm() < 1e-15);
    let z = project_halfspace_intersection(&[hs(&[1.0, 0.0], 0.0), hs(&[1.0, 0.0], 1.0)], &p(&[2.0, 0.0]), 1e-12)
        .unwrap();
    assert!(z.norm() < 1e-15);
}

#[test]
fn intersection_matches_kkt_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let dim = 2 + trial % 7;
        let m = 1 + trial % 6;
        let (cuts, x0) = common::random_system(&mut rng, dim, m);
        let oracle = common::qp_project(&cuts, &x0).expect("oracle found no KKT point");
        let hs: Vec<_> = cuts.iter().map(|(a, b)| Halfspace::new(p(a), *b).unwrap()).collect();
        let got = project_halfspace_intersection(&hs, &p(&x0), 1e-12).unwrap();
        worst = worst.max(common::dist(got.as_slice(), &oracle));
    }
    assert!(worst <= 1e-8, "worst deviation {worst:e}");
}

#[test]
fn many_cuts_take_the_iterative_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let (cuts, x0) = common::random_system(&mut rng, 3, 16);
        let oracle = common::qp_project(&cuts, &x0).unwrap();
        let hs: Vec<_> = cuts.iter().map(|(a, b)| Halfspace::new(p(a), *b).unwrap()).collect();
        let got = project_halfspace_intersection(&hs, &p(&x0), 1e-12).unwrap();
        let d = common::dist(got.as_slice(), &oracle);
        assert!(d <= 1e-8, "deviation {d:e}");
    }
}

#[test]
fn empty_intersection_is_reported() {
    let hs = |a: &[f64], b: f64| Halfspace::new(p(a), b).unwrap();
    let cuts = [hs(&[1.0, 0.0], -1.0), hs(&[-1.0, 0.0], -1.0)];
    assert!(project_halfspace_intersection(&cuts, &p(&[0.0, 0.0]), 1e-12).is_err());
}
