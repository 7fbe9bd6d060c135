//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

#[path = "../../core/tests/common/identities.rs"]
mod identities;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use joints_cli::analysis::Constants;
use joints_cli::document::{GeneratorSpec, Kind};
use joints_cli::experiment::ExperimentConfig;
use joints_cli::sweep::{self, SweepPlan, SweepRange};
use joints_core::affine::intersect_subspaces;
use joints_core::generators::{axis_grid, bush, finite_field_counterexample, loomis_whitney_grid, multijoint_grid};
use joints_core::incidence::{dyadic_levels, find_joints, kakeya_sum};
use joints_core::mpoly::{hasse_derivative, multiindices};
use joints_core::vanishing::{
    line_root_accounting, min_degree_annihilator, multijoint_dichotomy, multijoint_spec, verify_vanishing, Constraint,
    VanishingSpec,
};
use joints_core::zeroset::{
    classify_line, classify_point, line_census, nearly_planar_verify, planar_structure_search, planar_structure_verify,
    LineClass, PointClass, Violation,
};
use joints_core::{
    AffineSubspace, FactoredVariety, Field, FieldValue, Limits, Line, LineFamily, MultiPoly, Partition, Point,
};
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const IDENTITY_CASES_PER_FIELD: usize = 500;
const IDENTITY_TIME_LIMIT: Duration = Duration::from_secs(120);
const KAKEYA_TOL: f64 = 1e-9;
const BEZOUT_CASES: usize = 100;
const BEZOUT_EQUALITY_MIN: usize = 10;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q() -> Field {
    Field::rational()
}

fn fp(p: u64) -> Field {
    Field::prime(p).unwrap()
}

fn vecf(f: Field, xs: &[i64]) -> Vec<FieldValue> {
    xs.iter().map(|&x| f.from_i64(x)).collect()
}

fn lim() -> Limits {
    Limits::default()
}

fn c1_identities() -> Check {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut cases = 0;
    for (k, field) in [fp(5), fp(101), q()].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1de0 + k as u64);
        for i in 0..IDENTITY_CASES_PER_FIELD {
            let n = 2 + i % 3;
            for (name, outcome) in identities::run_case(field, n, &mut rng) {
                if let Err(e) = outcome {
                    failures.push(format!("{name} over {field}, n={n}: {e}"));
                }
            }
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    let (weighted, unweighted, truth) = identities::unweighted_expansion_counterexample();
    ensure(failures.is_empty(), || {
        format!("{} failures, first: {}", failures.len(), failures[0])
    })?;
    ensure(weighted == truth, || {
        "weighted expansion disagrees with the direct route".into()
    })?;
    ensure(elapsed <= IDENTITY_TIME_LIMIT, || format!("took {elapsed:.1?}"))?;
    Ok(format!(
        "{cases} cases × {} identities over F5, F101, Q in {elapsed:.1?}; unweighted expansion {} on the counterexample",
        identities::IDENTITIES.len(),
        if unweighted == truth { "agrees" } else { "disagrees" }
    ))
}

fn c2_characteristic() -> Check {
    for qq in [2u64, 3, 5] {
        let f = fp(qq);
        for n in 1..=2 {
            let p = MultiPoly::var(f, n, 0).pow(qq as u32);
            let origin = vec![f.zero(); n];
            let mut top = vec![0u32; n];
            top[0] = qq as u32;
            let d = hasse_derivative(&p, &top).map_err(|e| e.to_string())?;
            ensure(d.evaluate(&origin).unwrap().is_one(), || {
                format!("D^({qq}) x^{qq}(0) ≠ 1 over F{qq}")
            })?;
            for order in 1..=qq as u32 {
                for a in multiindices(n, order) {
                    let weight = a.iter().fold(f.one(), |acc, &ai| {
                        (1..=ai as u64).fold(acc, |acc, j| &acc * &f.from_u64(j))
                    });
                    let v = &weight * &hasse_derivative(&p, &a).unwrap().evaluate(&origin).unwrap();
                    ensure(v.is_zero(), || format!("a!·D^{a:?} x^{qq}(0) ≠ 0 over F{qq}"))?;
                }
            }
        }
    }
    Ok("q ∈ {2,3,5}, n ∈ {1,2}".into())
}

fn det3(a: &[FieldValue], b: &[FieldValue], c: &[FieldValue]) -> FieldValue {
    let m = |x: &FieldValue, y: &FieldValue| x * y;
    let t1 = &a[0] * &(&m(&b[1], &c[2]) - &m(&b[2], &c[1]));
    let t2 = &a[1] * &(&m(&b[0], &c[2]) - &m(&b[2], &c[0]));
    let t3 = &a[2] * &(&m(&b[0], &c[1]) - &m(&b[1], &c[0]));
    &(&t1 - &t2) + &t3
}

fn on_line(x: &[FieldValue], base: &[FieldValue], dir: &[FieldValue]) -> bool {
    let d: Vec<FieldValue> = x.iter().zip(base).map(|(a, b)| a - b).collect();
    (0..3).all(|i| (0..3).all(|j| (&(&d[i] * &dir[j]) - &(&d[j] * &dir[i])).is_zero()))
}

/// Joints of a family in `F_q³` by scanning every point: `(point, m, ordered
/// spanning triples)`.
fn scan_joints(field: Field, family: &LineFamily) -> Vec<(Point, usize, u64)> {
    let elems = field.elements().unwrap();
    let mut out = Vec::new();
    for a in &elems {
        for b in &elems {
            for c in &elems {
                let x = vec![a.clone(), b.clone(), c.clone()];
                let dirs: Vec<&[FieldValue]> = family
                    .lines()
                    .iter()
                    .filter(|l| on_line(&x, l.base(), l.direction()))
                    .map(|l| l.direction().as_slice())
                    .collect();
                let mut unordered = 0u64;
                for i in 0..dirs.len() {
                    for j in i + 1..dirs.len() {
                        for k in j + 1..dirs.len() {
                            if !det3(dirs[i], dirs[j], dirs[k]).is_zero() {
                                unordered += 1;
                            }
                        }
                    }
                }
                if unordered > 0 {
                    out.push((x, dirs.len(), 6 * unordered));
                }
            }
        }
    }
    out.sort();
    out
}

fn found(family: &LineFamily) -> Vec<(Point, usize, u64)> {
    let mut v: Vec<_> = find_joints(family, &lim())
        .unwrap()
        .into_iter()
        .map(|j| (j.point, j.m, j.tuples))
        .collect();
    v.sort();
    v
}

fn c3_grid() -> Check {
    let s = Rational64::new(3, 2);
    for side in 2..=6usize {
        let g = axis_grid(q(), 3, side, &lim()).map_err(|e| e.to_string())?;
        let n = side as u64;
        ensure(g.family.len() as u64 == 3 * n * n, || {
            format!("N={side}: {} lines", g.family.len())
        })?;
        ensure(g.joints.len() as u64 == n * n * n, || {
            format!("N={side}: {} joints", g.joints.len())
        })?;
        ensure(g.joints.iter().all(|j| j.m == 3 && j.tuples == 6), || {
            format!("N={side}: m or N(x) wrong")
        })?;
        let r = kakeya_sum(g.joints.iter().map(|j| j.m), g.family.len(), s)
            .unwrap()
            .ratio;
        ensure((r - 1.0).abs() <= KAKEYA_TOL, || format!("N={side}: ratio {r}"))?;
    }
    for side in 2..=4 {
        let g = axis_grid(fp(5), 3, side, &lim()).map_err(|e| e.to_string())?;
        ensure(found(&g.family) == scan_joints(fp(5), &g.family), || {
            format!("F5 N={side}: oracle mismatch")
        })?;
    }
    Ok(format!(
        "N = 2..6 over Q, ratio within {KAKEYA_TOL:e}; F5³ scan agrees for N ≤ 4"
    ))
}

fn sweep_csv(plan: &SweepPlan) -> String {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let code = sweep::run(plan, &lim(), Some(&path)).unwrap();
    assert_eq!(code, 0);
    std::fs::read_to_string(path).unwrap()
}

fn column(csv_text: &str, name: &str) -> Vec<String> {
    let body: String = csv_text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

fn c4_counterexample() -> Check {
    for p in [3u64, 5, 7] {
        let c = finite_field_counterexample(p, &lim()).map_err(|e| e.to_string())?;
        ensure(c.family.len() as u64 == 2 * p * p + p, || {
            format!("p={p}: {} lines", c.family.len())
        })?;
        ensure(c.joints.len() as u64 == p * p, || {
            format!("p={p}: {} joints", c.joints.len())
        })?;
        ensure(c.joints.iter().all(|j| j.m as u64 == p + 2), || {
            format!("p={p}: m ≠ p+2")
        })?;
        if p <= 5 {
            ensure(found(&c.family) == scan_joints(fp(p), &c.family), || {
                format!("p={p}: oracle mismatch")
            })?;
        }
    }
    let plan = SweepPlan {
        generator: GeneratorSpec::new(Kind::FfCounterexample),
        range: SweepRange {
            param: "p".into(),
            from: None,
            to: None,
            values: Some(vec![3, 5, 7, 11]),
        },
        constants: Constants::default(),
    };
    let ratios: Vec<f64> = column(&sweep_csv(&plan), "kakeya_3_2")
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    ensure(ratios.len() == 4 && ratios.windows(2).all(|w| w[0] < w[1]), || {
        format!("ratios {ratios:?}")
    })?;
    Ok(format!("p ∈ {{3,5,7}} exact, scan for 3 and 5; ratios {ratios:.4?}"))
}

fn c5_annihilator() -> Check {
    let f = fp(101);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut degrees = Vec::new();
    for _ in 0..20 {
        let mut pts = BTreeSet::new();
        while pts.len() < 10 {
            pts.insert(vec![
                f.from_u64(rng.random_range(0..101)),
                f.from_u64(rng.random_range(0..101)),
            ]);
        }
        let cs = pts
            .into_iter()
            .map(|point| Constraint::PointOrder { point, order: 1 })
            .collect();
        let spec = VanishingSpec::new(f, 2, cs).map_err(|e| e.to_string())?;
        let (d, p) = min_degree_annihilator(&spec, 4, &lim()).map_err(|e| e.to_string())?;
        ensure(verify_vanishing(&p, &spec).unwrap().ok(), || {
            format!("violations at degree {d}")
        })?;
        degrees.push(d);
    }
    let line: Vec<Constraint> = [[0, 0], [1, 1], [2, 2]]
        .iter()
        .map(|x| Constraint::PointOrder {
            point: vecf(q(), x),
            order: 1,
        })
        .collect();
    let spec = VanishingSpec::new(q(), 2, line).unwrap();
    let (d, p) = min_degree_annihilator(&spec, 4, &lim()).map_err(|e| e.to_string())?;
    ensure(d == 1 && verify_vanishing(&p, &spec).unwrap().ok(), || {
        format!("collinear: D = {d}")
    })?;
    Ok(format!(
        "max D = {} over 20 sets; collinear D = 1",
        degrees.iter().max().unwrap()
    ))
}

fn random_q(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> FieldValue {
    q().from_i64(rng.random_range(lo..=hi))
}

fn dot(a: &[FieldValue], b: &[FieldValue]) -> FieldValue {
    a.iter().zip(b).fold(q().zero(), |acc, (x, y)| &acc + &(x * y))
}

fn cross(a: &[FieldValue], b: &[FieldValue]) -> Vec<FieldValue> {
    vec![
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

fn nonzero_vec(rng: &mut ChaCha8Rng) -> Vec<FieldValue> {
    loop {
        let v: Vec<FieldValue> = (0..3).map(|_| random_q(rng, -4, 4)).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

/// `p = h^j · Π (λ − t_i)^{e_i} · g` with `λ` the line parameter and `h`
/// vanishing on the line. With `j = 0` and constant `g` the roots use up the
/// whole degree.
fn c6_bezout() -> Check {
    let f = q();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut equal = 0;
    for case in 0..BEZOUT_CASES {
        let base = nonzero_vec(&mut rng);
        let dir = nonzero_vec(&mut rng);
        let l = Line::new(0, f, &base, &dir).unwrap();
        let (base, dir) = (l.base().clone(), l.direction().clone());
        let w = loop {
            let w = nonzero_vec(&mut rng);
            if !dot(&w, &dir).is_zero() {
                break w;
            }
        };
        let wv = dot(&w, &dir);
        let lam_coeffs: Vec<FieldValue> = w.iter().map(|x| x / &wv).collect();
        let lam0 = -(&dot(&w, &base) / &wv);
        let tight = case < 2 * BEZOUT_EQUALITY_MIN;
        let j = if tight { 0 } else { rng.random_range(0..=2u32) };
        let roots_total = rng.random_range(1..=8 - j);
        let mut params: Vec<i64> = (-6..=6).collect();
        params.shuffle(&mut rng);
        let mut exps = Vec::new();
        let mut left = roots_total;
        while left > 0 {
            let e = rng.random_range(1..=left);
            exps.push(e);
            left -= e;
        }
        let mut p = MultiPoly::one(f, 3);
        let mut marked = Vec::new();
        for (&t, &e) in params.iter().zip(&exps) {
            let tv = f.from_i64(t);
            let factor = MultiPoly::affine_form(f, &(&lam0 - &tv), &lam_coeffs);
            p = &p * &factor.pow(e);
            marked.push((l.point_at(&tv), e));
        }
        if j > 0 {
            let u = loop {
                let u = cross(&dir, &nonzero_vec(&mut rng));
                if u.iter().any(|x| !x.is_zero()) {
                    break u;
                }
            };
            let h = MultiPoly::affine_form(f, &-dot(&u, &base), &u);
            p = &p * &h.pow(j);
        }
        let g_deg = if tight {
            0
        } else {
            rng.random_range(0..=8 - j - roots_total)
        };
        let mut g = MultiPoly::constant(f, 3, f.from_i64(rng.random_range(1..=5)));
        for _ in 0..g_deg {
            let form = MultiPoly::affine_form(f, &random_q(&mut rng, -3, 3), &nonzero_vec(&mut rng));
            g = &g * &(&form + &MultiPoly::constant(f, 3, f.from_i64(7)));
        }
        p = &p * &g;
        let deg = p.degree().finite().unwrap();
        ensure(deg <= 8, || format!("case {case}: degree {deg}"))?;
        let r = line_root_accounting(&p, &l, &marked).map_err(|e| format!("case {case}: {e}"))?;
        ensure(r.ok(), || format!("case {case}: {r:?}"))?;
        ensure(r.multiplicity_sum <= deg as u64, || {
            format!("case {case}: sum {} > {deg}", r.multiplicity_sum)
        })?;
        ensure(r.derivative_order == j, || {
            format!("case {case}: derivative order {} ≠ {j}", r.derivative_order)
        })?;
        if r.multiplicity_sum == deg as u64 {
            equal += 1;
        }
    }
    ensure(equal >= BEZOUT_EQUALITY_MIN, || format!("only {equal} equality cases"))?;
    Ok(format!("{BEZOUT_CASES} cases, {equal} with equality"))
}

fn forbidden_configuration() -> (LineFamily, Partition) {
    let f = q();
    let line = |id, b: &[i64], d: &[i64]| Line::new(id, f, &vecf(f, b), &vecf(f, d)).unwrap();
    let lines = vec![
        line(0, &[0, 0, 0], &[1, 0, 0]),
        line(1, &[0, 0, 0], &[0, 1, 0]),
        line(2, &[0, 0, 0], &[0, 0, 1]),
        line(3, &[1, 0, 0], &[0, 1, 0]),
        line(4, &[1, 0, 0], &[0, 0, 1]),
    ];
    let fam = LineFamily::new(f, 3, lines).unwrap();
    let o = vecf(f, &[0, 0, 0]);
    let z0 = AffineSubspace::new(f, &o, &[vecf(f, &[1, 0, 0]), vecf(f, &[0, 1, 0])]).unwrap();
    let y0 = AffineSubspace::new(f, &o, &[vecf(f, &[1, 0, 0]), vecf(f, &[0, 0, 1])]).unwrap();
    let assignment = [(o.clone(), 0), (vecf(f, &[1, 0, 0]), 1)].into_iter().collect();
    (
        fam,
        Partition {
            planes: vec![z0, y0],
            assignment,
        },
    )
}

fn c7_structure() -> Check {
    let half = Rational64::new(1, 2);
    for side in 2..=5 {
        let lw = loomis_whitney_grid(side, &lim()).map_err(|e| e.to_string())?;
        let joints = &lw.config.joints;
        let fam = &lw.config.family;
        let cert = planar_structure_verify(joints, fam, &lw.hint, half).unwrap();
        ensure(cert.accepted, || {
            format!("N={side}: planar structure rejected: {:?}", cert.violations)
        })?;
        let np = nearly_planar_verify(joints, fam, &dyadic_levels(joints), &lw.hint, half, half).unwrap();
        ensure(np.accepted, || format!("N={side}: nearly planar structure rejected"))?;
    }
    let (fam, part) = forbidden_configuration();
    let joints = find_joints(&fam, &lim()).unwrap();
    ensure(joints.len() == 2, || {
        format!("forbidden configuration has {} joints", joints.len())
    })?;
    let cert = planar_structure_verify(&joints, &fam, &part, half).unwrap();
    ensure(
        !cert.accepted && cert.violations.iter().any(|v| matches!(v, Violation::P2 { .. })),
        || format!("forbidden configuration: {:?}", cert.violations),
    )?;
    let b = bush(q(), 10, &vecf(q(), &[0, 0, 0]), false, false, &lim()).map_err(|e| e.to_string())?;
    let s = planar_structure_search(&b.joints, &b.family, half).unwrap();
    ensure(!s.success, || "non-coplanar bush admitted a planar structure".into())?;
    Ok(format!(
        "LW N = 2..5 accepted; shared line rejected with P2; bush M=10 best c1 = {}",
        s.best_c1
    ))
}

/// Planes with normals `(1, t, t²)` for distinct `t`: any three normals are
/// independent, so no three planes share a line.
fn c8_census() -> Check {
    let f = q();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut trials = 0;
    for m in 1..=6usize {
        for _ in 0..4 {
            let mut ts: Vec<i64> = (-8..=8).collect();
            ts.shuffle(&mut rng);
            let polys: Vec<MultiPoly> = ts[..m]
                .iter()
                .map(|&t| {
                    let normal = vecf(f, &[1, t, t * t]);
                    MultiPoly::affine_form(f, &random_q(&mut rng, -5, 5), &normal)
                })
                .collect();
            let v = FactoredVariety::from_planes(polys.clone()).map_err(|e| e.to_string())?;
            let planes = v.plane_factors();
            let mut seen = BTreeSet::new();
            let mut lines = Vec::new();
            for i in 0..m {
                for k in i + 1..m {
                    let (x0, dirs) = intersect_subspaces(&planes[i], &planes[k]).ok_or("parallel planes")?;
                    let l = Line::new(lines.len(), f, &x0, &dirs[0]).unwrap();
                    if seen.insert(l.space().clone()) {
                        lines.push(l);
                    }
                }
            }
            let pairs = m * (m - 1) / 2;
            ensure(lines.len() == pairs, || {
                format!("m={m}: {} distinct lines", lines.len())
            })?;
            for l in &lines {
                let c = classify_line(&v, l, &[]).unwrap();
                ensure(c == LineClass::CriticalLine, || {
                    format!("m={m}: line {} is {c:?}", l.id)
                })?;
            }
            let cands: Vec<_> = lines.iter().map(|l| (l.clone(), Vec::new())).collect();
            let census = line_census(&v, &cands).unwrap();
            ensure(
                census.critical == pairs && census.critical as u64 <= (m * m) as u64 && census.critical_ok,
                || format!("m={m}: census {census:?}"),
            )?;
            let plane = &planes[rng.random_range(0..m)];
            let d = plane.directions();
            let x = loop {
                let (s, t) = (random_q(&mut rng, -9, 9), random_q(&mut rng, -9, 9));
                let x: Vec<FieldValue> = (0..3)
                    .map(|i| &(&plane.base()[i] + &(&s * &d[0][i])) + &(&t * &d[1][i]))
                    .collect();
                if polys.iter().filter(|p| p.evaluate(&x).unwrap().is_zero()).count() == 1 {
                    break x;
                }
            };
            let diag: Vec<FieldValue> = (0..3).map(|i| &d[0][i] + &d[1][i]).collect();
            let through: Vec<Line> = [d[0].clone(), d[1].clone(), diag]
                .iter()
                .enumerate()
                .map(|(id, dir)| Line::new(id, f, &x, dir).unwrap())
                .collect();
            let c = classify_point(&v, &x, &through).unwrap();
            ensure(c == PointClass::Flat, || format!("m={m}: in-plane point is {c:?}"))?;
            trials += 1;
        }
    }
    Ok(format!("{trials} products, m = 1..6"))
}

fn c9_dichotomy() -> Check {
    let f = fp(101);
    let (mut t1, mut exc, mut runs) = (0, 0, 0);
    for n in [3usize, 4] {
        for side in 1..=3 {
            for (order, budget, per_joint) in [(1, 0, 0), (2, 0, 0), (1, 1, 1), (2, 1, 1), (3, 1, 0), (2, 2, 1)] {
                let g = multijoint_grid(f, n, 2, side, &lim()).map_err(|e| e.to_string())?;
                let tag = format!("n={n} N={side} order={order} A={budget}");
                let spec = multijoint_spec(f, &g.planes, &g.families, &g.multijoints, order, budget, per_joint)
                    .map_err(|e| format!("{tag}: {e}"))?;
                let (_, p) = min_degree_annihilator(&spec, 16, &lim()).map_err(|e| format!("{tag}: {e}"))?;
                ensure(verify_vanishing(&p, &spec).unwrap().ok(), || {
                    format!("{tag}: annihilator fails")
                })?;
                let r = multijoint_dichotomy(&p, &g.planes, &g.families, &g.multijoints, budget).unwrap();
                ensure(r.unclassified == 0, || {
                    format!("{tag}: {} unclassified", r.unclassified)
                })?;
                ensure(r.type1 + r.exceptional == g.multijoints.len(), || {
                    format!("{tag}: counts")
                })?;
                t1 += r.type1;
                exc += r.exceptional;
                runs += 1;
            }
        }
    }
    Ok(format!(
        "{runs} instances: {t1} type 1, {exc} exceptional, 0 unclassified"
    ))
}

fn strip_timestamp(s: &str) -> String {
    s.lines()
        .map(|l| match l.find("timestamp") {
            Some(i) if l.starts_with('#') => l[..i].to_string(),
            _ if l.trim_start().starts_with("\"timestamp\"") => String::new(),
            _ => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn c10_determinism() -> Check {
    let mut plans = Vec::new();
    let mut add = |kind, field: &str, param: &str, values: Vec<u64>| {
        let mut g = GeneratorSpec::new(kind);
        g.field = field.into();
        g.seed = Some(42);
        plans.push(SweepPlan {
            generator: g,
            range: SweepRange {
                param: param.into(),
                from: None,
                to: None,
                values: Some(values),
            },
            constants: Constants::default(),
        });
    };
    add(Kind::AxisGrid, "Q", "N", vec![2, 3, 4]);
    add(Kind::LoomisWhitney, "Q", "N", vec![2, 3]);
    add(Kind::Bush, "F7", "M", vec![3, 5, 7]);
    add(Kind::FfCounterexample, "Q", "p", vec![3, 5]);
    add(Kind::RandomLines, "F5", "count", vec![10, 20, 30]);
    add(Kind::RandomLines, "Q", "seed", vec![1, 2, 3]);
    add(Kind::MultijointGrid, "F101", "N", vec![1, 2]);
    add(Kind::StGrid, "Q", "N", vec![3, 4]);
    for plan in &plans {
        let (a, b) = (sweep_csv(plan), sweep_csv(plan));
        ensure(strip_timestamp(&a) == strip_timestamp(&b), || {
            format!("{} sweep differs between runs", plan.generator.kind.name())
        })?;
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("experiment.json");
    std::fs::write(
        &cfg,
        r#"{"generator": {"kind": "random-lines", "field": "F7", "count": 25}, "seed": 9,
            "analyses": ["joints", "kakeya", "levels", "structure-search"]}"#,
    )
    .unwrap();
    let config = ExperimentConfig::load(&cfg).map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("report{i}.json"));
        config.run(&lim(), Some(&out)).map_err(|e| e.to_string())?;
        reports.push(strip_timestamp(&std::fs::read_to_string(out).unwrap()));
    }
    ensure(reports[0] == reports[1], || "experiment reports differ".into())?;
    Ok(format!(
        "{} sweeps and one experiment report byte-identical",
        plans.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Hasse identity suite", c1_identities),
        ("characteristic witness", c2_characteristic),
        ("axis grid counts", c3_grid),
        ("finite-field counterexample", c4_counterexample),
        ("annihilator construction", c5_annihilator),
        ("Bézout accounting", c6_bezout),
        ("structure certification", c7_structure),
        ("zero-set censuses", c8_census),
        ("multijoint dichotomy", c9_dichotomy),
        ("sweep determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
