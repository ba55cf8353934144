use capunfold::base::{unfold_polyhedron, PipelineConfig};
use capunfold::cap::{project, validate_cap, Cap, Point3};
use capunfold::capgen::{generate_cap, GenParams};
use capunfold::forest::{build_forest, check_forest};
use capunfold::geom::{
    cg_center, cg_error_bound, compose, composite_center, convex_hull_2d, in_convex_polygon, polygons_overlap, Point2,
    Rigid2, RotationSeq,
};
use capunfold::io::{format_off, parse_off};
use capunfold::unfold::{develop, gap_closure_error, tree_tour};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point2> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn motion() -> impl Strategy<Value = Rigid2> {
    (-3.0..3.0f64, point()).prop_map(|(a, t)| Rigid2::new(a, t))
}

fn small_chain(max_omega: f64) -> impl Strategy<Value = RotationSeq> {
    prop::collection::vec((1e-6..max_omega, point()), 1..10)
        .prop_map(|pairs| RotationSeq::from_pairs(&pairs).unwrap())
}

fn hull_of(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec(point(), n)
        .prop_map(|pts| convex_hull_2d(&pts))
        .prop_filter("needs area", |h| h.len() >= 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cg_center_in_hull(seq in small_chain(0.6)) {
        let c = cg_center(&seq).unwrap();
        let centers = seq.centers();
        let hull = convex_hull_2d(&centers);
        if hull.len() >= 3 {
            prop_assert!(in_convex_polygon(&hull, c, 1e-12));
        } else {
            // Collinear centers: the weighted mean lies between the extremes.
            let d = centers.iter().map(|p| p.dist(c)).fold(f64::INFINITY, f64::min);
            let span = centers.iter().map(|p| p.dist(centers[0])).fold(0.0, f64::max);
            prop_assert!(d <= span + 1e-9);
        }
    }

    #[test]
    fn overlap_is_symmetric(a in hull_of(3..9), b in hull_of(3..9)) {
        prop_assert_eq!(polygons_overlap(&a, &b).unwrap(), polygons_overlap(&b, &a).unwrap());
    }

    #[test]
    fn polygon_overlaps_itself(a in hull_of(3..9), m in motion()) {
        let moved: Vec<Point2> = a.iter().map(|&p| m.apply(p)).collect();
        prop_assert!(polygons_overlap(&moved, &moved).unwrap());
    }

    #[test]
    fn composition_is_associative(a in motion(), b in motion(), c in motion(), p in point()) {
        let left = a.then(&b).then(&c).apply(p);
        let right = a.then(&b.then(&c)).apply(p);
        prop_assert!(left.dist(right) < 1e-9);
        prop_assert!(c.apply(b.apply(a.apply(p))).dist(left) < 1e-9);
    }

    #[test]
    fn inverse_undoes(m in motion(), p in point()) {
        prop_assert!(m.then(&m.inverse()).apply(p).dist(p) < 1e-9);
    }

    #[test]
    fn composite_center_is_fixed(seq in small_chain(0.3)) {
        let c = composite_center(&seq).unwrap();
        let m = compose(&seq).unwrap();
        prop_assert!(m.apply(c).dist(c) < 1e-9 * (1.0 + c.norm()));
    }

    #[test]
    fn cg_bound_holds_for_small_angles(seq in small_chain(1e-3)) {
        let c = composite_center(&seq).unwrap();
        let p = cg_center(&seq).unwrap();
        prop_assert!(c.dist(p) <= 1.2 * cg_error_bound(&seq) + 1e-9);
    }

    #[test]
    fn off_round_trip(zs in prop::collection::vec(1e-3..1.0f64, 1..4), r in 0.5..5.0f64) {
        let m = 6;
        let mut vertices: Vec<Point3> = (0..m)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / m as f64;
                Point3::new(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect();
        vertices.push(Point3::new(0.1 * r, -0.03 * r, zs[0]));
        let cap = Cap {
            vertices,
            triangles: (0..m).map(|i| [i, (i + 1) % m, m]).collect(),
            boundary: (0..m).collect(),
        };
        let back = parse_off(&format_off(&cap)).unwrap();
        prop_assert_eq!(back, cap);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generated_caps_satisfy_pipeline(seed in 0u64..10_000, n in 30usize..150, sides in 6usize..14) {
        let cap = generate_cap(&GenParams { seed, n_target: n, phi_max: 0.04, boundary_sides: sides }).unwrap();
        validate_cap(&cap).unwrap();
        let g = project(&cap).unwrap();
        let (_, frame, forest) = build_forest(&g, 3f64.to_radians()).unwrap();
        prop_assert!(check_forest(&forest, &g, &frame).passes());
        let dev = develop(&cap, &forest, None).unwrap();
        for tree in forest.trees() {
            let tour = tree_tour(&cap, &dev, &forest, &tree).unwrap();
            prop_assert!(gap_closure_error(&tour).unwrap() < 1e-9);
        }
        // Net area is the cap area whatever the outcome of the edge scan.
        if let Ok(r) = unfold_polyhedron(&cap, &PipelineConfig::default()) {
            prop_assert!(r.full.relative_area_error() < 1e-9);
            for e in &r.edge_reports {
                prop_assert!(!e.globally_safe || e.locally_safe);
            }
        }
    }
}
