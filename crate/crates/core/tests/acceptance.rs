//! End-to-end acceptance checks, one line per criterion.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use capunfold::base::{
    omega_grid, scene_reports, sweep_counterexample, unfold_polyhedron, PipelineConfig,
};
use capunfold::cap::{curvature_bounds_check, project, validate_cap, Cap, Point3};
use capunfold::capgen::{generate_cap, generate_counterexample, AdversarialScene, GenParams};
use capunfold::forest::{build_forest, check_forest, cone_violations};
use capunfold::geom::{
    cg_center, cg_error_bound, compose, convex_hull_2d, in_convex_polygon, normalize_angle, polygons_overlap_with,
    two_rotation_center, Point2, RotationSeq,
};
use capunfold::unfold::{check_net_simple, develop, tree_tour};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

const DELTA_THETA_DEG: f64 = 3.0;

fn test_caps() -> Vec<(u64, Cap)> {
    (0..20u64)
        .map(|seed| {
            let n_target = 50 + (seed as usize * 150) / 19;
            let params = GenParams { seed, n_target, ..Default::default() };
            (seed, generate_cap(&params).expect("generator"))
        })
        .collect()
}

/// Fixed point of `x ↦ R(angle)·x + t`, solved directly.
fn solve_fixed_point(angle: f64, t: Point2) -> Point2 {
    let (s, c) = angle.sin_cos();
    let (a, b, cc, d) = (1.0 - c, s, -s, 1.0 - c);
    let det = a * d - b * cc;
    Point2::new((d * t.x - b * t.y) / det, (-cc * t.x + a * t.y) / det)
}

/// Rotation by `w2` about (1,0), then by `w1` about the origin, as a matrix
/// product.
fn two_rotation_oracle(w1: f64, w2: f64) -> Point2 {
    let rot = |w: f64, p: Point2| Point2::new(w.cos() * p.x - w.sin() * p.y, w.sin() * p.x + w.cos() * p.y);
    let p2 = Point2::new(1.0, 0.0);
    // Image of the origin gives the translation part.
    let t = rot(w1, p2 + rot(w2, Point2::ORIGIN - p2));
    solve_fixed_point(w1 + w2, t)
}

fn c1_two_rotation() -> Outcome {
    let grid: Vec<f64> = (1..=20).map(|k| 1e-4 * 3000f64.powf(k as f64 / 20.0)).collect();
    let mut worst: f64 = 0.0;
    for &w1 in &grid {
        for &w2 in &grid {
            let closed = two_rotation_center(w1, w2).unwrap();
            let seq = RotationSeq::from_pairs(&[(w2, Point2::new(1.0, 0.0)), (w1, Point2::ORIGIN)]).unwrap();
            let composed = compose(&seq).unwrap().fixed_point().unwrap();
            worst = worst
                .max(closed.dist(composed))
                .max(closed.dist(two_rotation_oracle(w1, w2)));
        }
    }
    outcome(worst <= 1e-10, format!("max deviation {worst:.2e} over 400 angle pairs"))
}

fn c2_error_constant() -> Outcome {
    let w = 1e-3;
    let c = two_rotation_oracle(w, w);
    let p = Point2::new(0.5, 0.0);
    let seq = RotationSeq::from_pairs(&[(w, Point2::new(1.0, 0.0)), (w, Point2::ORIGIN)]).unwrap();
    let cg = cg_center(&seq).unwrap();
    let ratio = c.dist(p) / (2.0 * w);
    let pass = (0.1225..=0.1275).contains(&ratio) && cg.dist(p) < 1e-15;
    outcome(pass, format!("δ/(ω₁+ω₂) = {ratio:.6}"))
}

fn random_chain(rng: &mut ChaCha8Rng, max_omega: f64, k: usize) -> RotationSeq {
    let pairs: Vec<(f64, Point2)> = (0..k)
        .map(|_| {
            let w = max_omega * (1.0 - rng.random::<f64>());
            (w, Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        })
        .collect();
    RotationSeq::from_pairs(&pairs).unwrap()
}

fn c3_k_rotation_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..200 {
        let k = rng.random_range(1..=10);
        let seq = random_chain(&mut rng, 1e-3, k);
        let m = compose(&seq).unwrap();
        let c = solve_fixed_point(m.angle, m.t);
        let p = cg_center(&seq).unwrap();
        let bound = cg_error_bound(&seq);
        let err = c.dist(p);
        if k > 1 {
            worst = worst.max(err / bound);
        }
        // A single rotation has zero bound; allow rounding only.
        if err > 1.2 * bound + 1e-12 {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures} failures, worst |c−p|/bound = {worst:.4}"))
}

fn c4_hull_membership() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = 0;
    for _ in 0..1000 {
        let k = rng.random_range(3..=12);
        let seq = random_chain(&mut rng, 0.5, k);
        let hull = convex_hull_2d(&seq.centers());
        let c = cg_center(&seq).unwrap();
        if hull.len() < 3 || !in_convex_polygon(&hull, c, 1e-12) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures} of 1000 outside the hull"))
}

fn c5_forest(caps: &[(u64, Cap)]) -> Outcome {
    let dt = DELTA_THETA_DEG.to_radians();
    let mut violations = 0;
    let mut checked = 0;
    for (_, cap) in caps {
        let g = project(cap).unwrap();
        let Ok((_, frame, forest)) = build_forest(&g, dt) else {
            violations += 1;
            continue;
        };
        violations += check_forest(&forest, &g, &frame).violation_count();
        violations += cone_violations(&g, &frame).len();
        // Exhaustive cone test with plain angle arithmetic.
        for v in g.internal_vertices() {
            if v == frame.apex {
                continue;
            }
            checked += 1;
            let d = g.positions[v] - frame.apex_pos;
            if normalize_angle(d.angle() - frame.axis_angle).abs() <= 2.0 * dt {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations, {checked} vertices checked against the empty cone"))
}

fn c6_flat_limit(caps: &[(u64, Cap)]) -> Outcome {
    let mut worst_pos: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for (_, cap) in caps.iter().take(5) {
        let mut flat = cap.clone();
        for p in &mut flat.vertices {
            p.z = 0.0;
        }
        if validate_cap(&flat).is_err() {
            return outcome(false, "flat cap rejected by validation");
        }
        let g = project(&flat).unwrap();
        let (apex, _, forest) = build_forest(&g, DELTA_THETA_DEG.to_radians()).unwrap();
        let dev = develop(&flat, &forest, Some(apex.gap_edge)).unwrap();
        for (f, t) in flat.triangles.iter().enumerate() {
            for (k, &v) in t.iter().enumerate() {
                let d = dev.faces[f][k] - flat.vertices[v].xy();
                worst_pos = worst_pos.max(d.x.abs()).max(d.y.abs());
            }
        }
        for gs in &dev.gap_segments {
            worst_gap = worst_gap.max(gs.length());
        }
    }
    outcome(
        worst_pos <= 1e-9 && worst_gap <= 1e-9,
        format!("max coordinate deviation {worst_pos:.2e}, max gap {worst_gap:.2e}"),
    )
}

fn hex_pyramid() -> Cap {
    let mut vertices: Vec<Point3> = (0..6)
        .map(|i| {
            let a = i as f64 * std::f64::consts::PI / 3.0;
            Point3::new(a.cos(), a.sin(), 0.0)
        })
        .collect();
    vertices.push(Point3::new(0.03, -0.02, 0.08));
    Cap {
        vertices,
        triangles: (0..6).map(|i| [i, (i + 1) % 6, 6]).collect(),
        boundary: (0..6).collect(),
    }
}

fn c7_gap_closure(caps: &[(u64, Cap)]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut roots = 0;
    let pyramid = hex_pyramid();
    let all = caps.iter().map(|(_, c)| c).chain(std::iter::once(&pyramid));
    for cap in all {
        let g = project(cap).unwrap();
        let (_, _, forest) = build_forest(&g, DELTA_THETA_DEG.to_radians()).unwrap();
        let dev = develop(cap, &forest, None).unwrap();
        for tree in forest.trees() {
            let tour = tree_tour(cap, &dev, &forest, &tree).unwrap();
            let seg = dev
                .gap_segments
                .iter()
                .find(|s| s.root == tree.root && s.top == tree.top)
                .unwrap();
            let moved = compose(&tour.rotations).unwrap().apply(seg.v);
            worst = worst.max(moved.dist(seg.v_prime));
            roots += 1;
        }
    }
    outcome(worst <= 1e-9, format!("{roots} trees, max |T(v) − v′| = {worst:.2e}"))
}

fn c8_base_safe(caps: &[(u64, Cap)]) -> Outcome {
    let cfg = PipelineConfig::default();
    let mut eligible = 0;
    let mut failures = Vec::new();
    let mut worst_area: f64 = 0.0;
    for (seed, cap) in caps {
        let metrics = validate_cap(cap).unwrap();
        if !curvature_bounds_check(&metrics, cfg.delta_theta, None).passes() {
            continue;
        }
        eligible += 1;
        let r = match unfold_polyhedron(cap, &cfg) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let net = &r.full.cap_net;
        let simple = check_net_simple(net, cfg.tol * net.diameter).simple;
        let base_clear = net
            .faces
            .iter()
            .all(|f| !polygons_overlap_with(f, &r.full.base_polygon, cfg.tol * net.diameter).unwrap());
        let area_err = r.full.relative_area_error();
        worst_area = worst_area.max(area_err);
        if !simple || !base_clear || area_err > 1e-9 {
            failures.push(format!("seed {seed}: simple={simple} base_clear={base_clear} area={area_err:.2e}"));
        }
    }
    let pass = failures.is_empty() && eligible > 0;
    outcome(
        pass,
        format!(
            "{eligible}/20 caps within bounds, {} failures, max area error {worst_area:.2e}{}",
            failures.len(),
            failures.first().map(|f| format!(" ({f})")).unwrap_or_default()
        ),
    )
}

fn c9_counterexample() -> Outcome {
    let cut = 5f64.to_radians();
    let grid = omega_grid(1e-12, 1.0, 1.25);
    let twelve = sweep_counterexample(12, cut, &grid, 1e-9).unwrap();
    let eight = sweep_counterexample(8, cut, &grid, 1e-9).unwrap();
    let Some(threshold) = twelve.threshold else {
        return outcome(false, "n=12 sweep found no threshold");
    };
    let scene = generate_counterexample(&AdversarialScene { n_gon: 12, omega: threshold, cut_angle: cut }).unwrap();
    let safe12 = scene_reports(&scene, 1e-9).unwrap().iter().filter(|r| r.globally_safe).count();
    let max8 = eight.steps.iter().map(|s| s.overlapping_edges).max().unwrap_or(0);
    let quadrant = generate_cap(&GenParams { seed: 12, boundary_sides: 12, ..Default::default() })
        .ok()
        .and_then(|cap| unfold_polyhedron(&cap, &PipelineConfig::default()).ok())
        .map(|r| r.safe_edge_count())
        .unwrap_or(0);
    let pass = safe12 == 0 && eight.threshold.is_none() && quadrant >= 1;
    outcome(
        pass,
        format!(
            "n=12 threshold ω={threshold:.3e} safe edges: {safe12}; n=8 at most {max8}/8 edges overlapped up to ω={:.3}; quadrant forest on a 12-gon, safe edges: {quadrant}",
            eight.steps.last().map(|s| s.omega).unwrap_or(0.0)
        ),
    )
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_capunfold");
    let run = |args: &[&str]| Command::new(bin).args(args).current_dir(dir.path()).env_remove("CAPUNFOLD_TOL").output().unwrap();
    if !run(&["gen", "--seed", "11", "--n", "120", "--out", "cap.off"]).status.success() {
        return outcome(false, "gen failed");
    }
    for i in 0..2 {
        let (j, s) = (format!("r{i}.json"), format!("n{i}.svg"));
        if !run(&["full", "cap.off", "--json", &j, "--svg", &s]).status.success() {
            return outcome(false, "full failed");
        }
    }
    let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
    let strip = |bytes: Vec<u8>| {
        let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        serde_json::to_vec(&v).unwrap()
    };
    let json_same = strip(read("r0.json")) == strip(read("r1.json"));
    let svg_same = read("n0.svg") == read("n1.svg");
    outcome(json_same && svg_same, format!("json identical: {json_same}, svg identical: {svg_same}"))
}

type Criterion<'a> = (&'static str, Option<Duration>, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let caps = test_caps();
    let criteria: Vec<Criterion> = vec![
        ("two-rotation closed form", Some(Duration::from_secs(1)), Box::new(c1_two_rotation)),
        ("error constant 1/8", Some(Duration::from_secs(1)), Box::new(c2_error_constant)),
        ("k-rotation bound", Some(Duration::from_secs(1)), Box::new(c3_k_rotation_bound)),
        ("hull membership", None, Box::new(c4_hull_membership)),
        ("forest invariants", Some(Duration::from_secs(10)), Box::new(|| c5_forest(&caps))),
        ("flat-limit development", None, Box::new(|| c6_flat_limit(&caps))),
        ("gap closure", None, Box::new(|| c7_gap_closure(&caps))),
        ("safe base attachment", Some(Duration::from_secs(30)), Box::new(|| c8_base_safe(&caps))),
        ("counterexample reproduction", Some(Duration::from_secs(5)), Box::new(c9_counterexample)),
        ("determinism", None, Box::new(c10_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = check();
        let elapsed = t.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<28} {}  {} [{:.3} s{}]",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
