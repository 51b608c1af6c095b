//! Acceptance suite: one pass/fail line per criterion, with timings against the budget.

use std::time::Instant;

use wavefront::curvature::{LocalCurvature, Sheet};
use wavefront::fixtures::fixture;
use wavefront::germ::{classify_germ, GermClass};
use wavefront::loci::find_umbilics;
use wavefront::report::analyze_focal;
use wavefront::sweep::{near_umbilic, refine_cpc_ridge, singular_sweep, umbilic_sites};
use wavefront::trace::cpc_ridge_intersections;
use wavefront::verify::{germ_rotation, jacobian_formula, normal_forms, route_agreement, versality_biconditionals};
use wavefront::{Region64, SingularityType, Surface64};

struct Outcome {
    ok: bool,
    detail: String,
}

fn run(id: usize, name: &str, budget_s: f64, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let secs = start.elapsed().as_secs_f64();
    let ok = out.ok && secs < budget_s;
    println!(
        "criterion {id} {name}: {} ({}; {secs:.2}s of {budget_s}s)",
        if ok { "PASS" } else { "FAIL" },
        out.detail
    );
    ok
}

const FIXTURE_TYPES: [(&str, SingularityType); 8] = [
    ("S-A2", SingularityType::CuspidalEdge),
    ("S-SW", SingularityType::Swallowtail),
    ("S-CBF", SingularityType::CuspidalButterfly),
    ("S-LIPS", SingularityType::CuspidalLips),
    ("S-BKS", SingularityType::CuspidalBeaks),
    ("S-ELL", SingularityType::D4Minus3D),
    ("S-HYP", SingularityType::D4Plus3D),
    ("S-HYPRA", SingularityType::D4Plus3D),
];

fn fixtures() -> Outcome {
    let mut bad = Vec::new();
    for (name, expected) in FIXTURE_TYPES {
        let s: Surface64 = fixture(name).unwrap();
        match analyze_focal(&s, [0.0, 0.0], Sheet::Blue) {
            Ok(r) => {
                let e = &r.evidence;
                let routes = [e.geometric.is_some(), e.front.is_some(), e.germ.is_some()].iter().filter(|&&x| x).count();
                if r.kind != expected || !e.failures.is_empty() || routes < 2 {
                    bad.push(format!("{name}: {:?} routes={routes} {:?}", r.kind, e.failures));
                }
            }
            Err(err) => bad.push(format!("{name}: {err}")),
        }
    }
    Outcome { ok: bad.is_empty(), detail: if bad.is_empty() { "8/8 fixtures".into() } else { bad.join("; ") } }
}

fn agreement() -> Outcome {
    let b = route_agreement(100, 42);
    Outcome { ok: b.ok(), detail: format!("{}/{} agree", b.passed, b.total) }
}

fn versality() -> Outcome {
    let all = versality_biconditionals(50, 7);
    let ok = all.iter().all(|b| b.ok());
    let detail = all.iter().map(|b| format!("{} {}/{}", b.name, b.passed, b.total)).collect::<Vec<_>>().join(", ");
    Outcome { ok, detail }
}

fn jacobian() -> Outcome {
    let (b, worst) = jacobian_formula(100, 42);
    Outcome { ok: b.ok() && b.total == 100 && worst < 1e-6, detail: format!("{}/{} triples, max rel {worst:.2e}", b.passed, b.total) }
}

const GRID: usize = 400;
const UMBILIC_COUNTS: [(&str, usize); 2] = [("S-ELL", 3), ("S-HYP", 1)];

/// Same-colour constant curvature and ridge crossings within the umbilic neighbourhood.
fn crossing_counts() -> Outcome {
    let region = Region64::square(0.5);
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, expected) in UMBILIC_COUNTS {
        let s: Surface64 = fixture(name).unwrap();
        let sites = umbilic_sites(&s, &region, 64);
        for c in [0.95, 1.05] {
            let mut hits: Vec<[f64; 2]> = Vec::new();
            for sheet in [Sheet::Blue, Sheet::Red] {
                for h in cpc_ridge_intersections(&s, c, sheet, &region, GRID) {
                    let q = refine_cpc_ridge(&s, sheet, c, h).unwrap_or(h);
                    if !hits.iter().any(|p| (p[0] - q[0]).hypot(p[1] - q[1]) < 1e-7) {
                        hits.push(q);
                    }
                }
            }
            let n = near_umbilic(&hits, &sites, c).len();
            ok &= sites.len() == 1 && n == expected;
            parts.push(format!("{name} c={c}: {n}"));
        }
    }
    Outcome { ok, detail: parts.join(", ") }
}

fn sweep_counts() -> Outcome {
    let region = Region64::square(0.5);
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, expected) in UMBILIC_COUNTS {
        let s: Surface64 = fixture(name).unwrap();
        let sweep = singular_sweep(&s, &region, &[1.0 / 1.05, 1.0 / 0.95], GRID);
        for f in &sweep.frames {
            let n = f.near_umbilic.get(&SingularityType::Swallowtail).copied().unwrap_or(0);
            ok &= n == expected;
            parts.push(format!("{name} t={:.4}: {n}", f.t));
        }
    }
    Outcome { ok, detail: parts.join(", ") }
}

fn ellipsoid_umbilics() -> Outcome {
    let s = Surface64::Ellipsoid { axes: [3.0, 2.0, 1.0] };
    let (x, z) = (3.0 * (5.0f64 / 8.0).sqrt(), (3.0f64 / 8.0).sqrt());
    let gap = |p: [f64; 2]| LocalCurvature::at(&s, p).map(|lc| lc.principal.gap()).unwrap_or(f64::INFINITY);
    let pi = std::f64::consts::PI;
    // grid-scan oracle: the classical points are local minima of the curvature gap
    let mut expected = Vec::new();
    for lon in [0.0, pi] {
        for sz in [-1.0, 1.0] {
            let p = [(sz * z).asin(), lon];
            let h = 1e-3;
            let mut best = (f64::INFINITY, [0.0; 2]);
            for i in -10..=10 {
                for j in -10..=10 {
                    let q = [p[0] + i as f64 * h, p[1] + j as f64 * h];
                    let g = gap(q);
                    if g < best.0 {
                        best = (g, q);
                    }
                }
            }
            if best.1 != p || gap(p) > 1e-6 {
                return Outcome { ok: false, detail: format!("oracle rejects {p:?}: min at {:?}", best.1) };
            }
            expected.push([if lon == 0.0 { x } else { -x }, 0.0, sz * z]);
        }
    }
    let region = Region64::new([-1.5, 1.5], [-pi / 2.0, 1.5 * pi]).unwrap();
    let found = find_umbilics(&s, &region, 120);
    let mut worst: f64 = 0.0;
    let mut matched = 0;
    for e in &expected {
        if let Some(d) = found
            .iter()
            .map(|u| (0..3).map(|k| (u.position[k] - e[k]).abs()).fold(0.0, f64::max))
            .min_by(|a, b| a.partial_cmp(b).unwrap())
        {
            worst = worst.max(d);
            matched += (d < 1e-6) as usize;
        }
    }
    Outcome { ok: found.len() == 4 && matched == 4, detail: format!("{} found, {matched}/4 within 1e-6 (max {worst:.1e})", found.len()) }
}

fn normal_form_labels() -> Outcome {
    let expected = [GermClass::A2, GermClass::A3, GermClass::A4, GermClass::D4Plus, GermClass::D4Minus];
    let mut bad = Vec::new();
    for ((name, g), want) in normal_forms().into_iter().zip(expected) {
        let got = classify_germ(&g).map(|c| c.class);
        if got != Ok(want) {
            bad.push(format!("{name}: {got:?}"));
        }
    }
    let rot = germ_rotation(10, 11);
    Outcome {
        ok: bad.is_empty() && rot.ok(),
        detail: format!("5 normal forms {}, rotations {}/{}", if bad.is_empty() { "ok".into() } else { bad.join(" ") }, rot.passed, rot.total),
    }
}

fn main() {
    let results = [
        run(1, "fixture table", 5.0, fixtures),
        run(2, "route agreement", 60.0, agreement),
        run(3, "versality biconditionals", 30.0, versality),
        run(4, "parallel Jacobian", 60.0, jacobian),
        run(5, "constant curvature and ridge counts", 30.0, crossing_counts),
        run(6, "sweep swallowtails", 60.0, sweep_counts),
        run(7, "ellipsoid umbilics", 30.0, ellipsoid_umbilics),
        run(8, "normal forms", 60.0, normal_form_labels),
    ];
    let passed = results.iter().filter(|&&x| x).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
