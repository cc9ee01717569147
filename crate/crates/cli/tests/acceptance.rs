//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use veq_cli::repro;
use veq_core::conditions::{
    check_c_convex, check_diagonal, check_essential_quasimonotone, check_kkm, check_pseudomonotone, DiagonalMode,
    KkmForm, Slice, SubsetSampling,
};
use veq_core::expr::{fixture, FixtureParams};
use veq_core::geometry::pair_weights;
use veq_core::solver::{epsilon_equilibrium, solve_dual, solve_primal, vvi, PerturbationSpec, VviKind};
use veq_core::{FixtureId, GridDomain, PolyCone, Region, SolutionSet, VExpr};

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn unit_grid(n: usize) -> GridDomain {
    GridDomain::box_grid(&[0.0], &[1.0], 1.0 / (n - 1) as f64).unwrap()
}

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{detail} in {took:.2?}"))
    } else {
        Err(format!("{detail} but took {took:.2?} (limit {limit:?})"))
    }
}

fn repro_case(name: &str, limit: Duration) -> Outcome {
    let start = Instant::now();
    let r = repro::repro(name);
    if r["exit_code"] != 0 {
        return Err(format!("report: {r}"));
    }
    let failed: Vec<String> = r["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["passed"] != true)
        .map(|a| a["id"].to_string())
        .collect();
    if !failed.is_empty() {
        return Err(format!("assertions failed: {failed:?}"));
    }
    within(limit, start, format!("{} assertions hold", r["assertions"].as_array().unwrap().len()))
}

fn c1_ex31() -> Outcome {
    repro_case("ex31", Duration::from_secs(10))
}

fn c2_ex32() -> Outcome {
    repro_case("ex32", Duration::from_secs(1))
}

fn affine(rng: &mut ChaCha8Rng) -> String {
    let mut c = || rng.gen_range(-8i32..=8) as f64 / 4.0;
    format!("{} + {} * x1 + {} * y1 + {} * z1", c(), c(), c(), c())
}

fn c3_pseudomonotone() -> Outcome {
    let start = Instant::now();
    let (grid, cone) = (unit_grid(9), PolyCone::orthant(1));
    let mut passed = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let var = ["x1", "y1", "z1"][rng.gen_range(0..3)];
        let t = rng.gen_range(0..=8) as f64 / 8.0;
        let text = format!("piecewise{{ if {var} <= {t} : {} ; else : {} }}", affine(&mut rng), affine(&mut rng));
        let f = VExpr::parse(&text).unwrap();
        if check_pseudomonotone(&f, &grid, &cone, TOL).map_err(|e| e.to_string())?.is_ok() {
            passed += 1;
            let p = solve_primal(&f, &grid, &cone, TOL).map_err(|e| e.to_string())?;
            let d = solve_dual(&f, &grid, &cone, TOL).map_err(|e| e.to_string())?;
            if !p.is_subset_of(&d) {
                return Err(format!("seed {seed}: primal not in dual for {text}"));
            }
        }
    }
    within(Duration::from_secs(60), start, format!("{passed}/100 pseudomonotone instances, primal ⊆ dual on all"))
}

/// `F(x,y,z) = a (y - x) + b (y^2 - x^2) + c z (y - x) + d`, evaluated by hand.
struct Scalar([f64; 4]);

impl Scalar {
    fn text(&self) -> String {
        let [a, b, c, d] = self.0;
        format!("{a} * (y1 - x1) + {b} * (y1 * y1 - x1 * x1) + {c} * z1 * (y1 - x1) + {d}")
    }

    fn eval(&self, x: f64, y: f64, z: f64) -> f64 {
        let [a, b, c, d] = self.0;
        a * (y - x) + b * (y * y - x * x) + c * z * (y - x) + d
    }
}

fn c4_scalar_oracle() -> Outcome {
    let start = Instant::now();
    let (grid, cone) = (unit_grid(21), PolyCone::orthant(1));
    let pts: Vec<f64> = grid.points().iter().map(|p| p[0]).collect();
    let mut sizes = Vec::new();
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let mut c = || rng.gen_range(-12i32..=12) as f64 / 4.0;
        let inst = Scalar([c(), c(), c(), if seed % 5 == 0 { c() / 8.0 } else { 0.0 }]);
        let f = VExpr::parse(&inst.text()).unwrap();
        let got = solve_primal(&f, &grid, &cone, TOL).map_err(|e| e.to_string())?;
        let want: Vec<Vec<f64>> = pts
            .iter()
            .filter(|&&x| pts.iter().map(|&y| inst.eval(x, y, x)).fold(f64::INFINITY, f64::min) >= -TOL)
            .map(|&x| vec![x])
            .collect();
        if got.solutions != want {
            return Err(format!("seed {seed}: {} gives {:?}, oracle {:?}", inst.text(), got.solutions, want));
        }
        sizes.push(want.len());
    }
    let nonempty = sizes.iter().filter(|&&n| n > 0).count();
    within(Duration::from_secs(10), start, format!("50/50 match the min-scan oracle ({nonempty} nonempty)"))
}

fn endpoints(s: &SolutionSet) -> Option<(f64, f64)> {
    let xs: Vec<f64> = s.solutions.iter().map(|p| p[0]).collect();
    Some((xs.iter().copied().reduce(f64::min)?, xs.iter().copied().reduce(f64::max)?))
}

fn c5_vvi() -> Outcome {
    let start = Instant::now();
    let (grid, cone) = (unit_grid(101), PolyCone::orthant(1));
    let step = 0.01;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        let a = rng.gen_range(0.5..3.0);
        // Roots on the grid, or outside [0, 1] for every fourth instance.
        let root = if seed % 4 == 3 {
            if rng.gen_bool(0.5) { -rng.gen_range(0.05..0.5) } else { 1.0 + rng.gen_range(0.05..0.5) }
        } else {
            rng.gen_range(0..=100) as f64 / 100.0
        };
        let params: FixtureParams = [("a".to_string(), a), ("b".to_string(), -a * root)].into_iter().collect();
        let s = vvi(&params, VviKind::Stampacchia, &grid, &cone, TOL).map_err(|e| e.to_string())?;
        let m = vvi(&params, VviKind::Minty, &grid, &cone, TOL).map_err(|e| e.to_string())?;
        let (Some(es), Some(em)) = (endpoints(&s), endpoints(&m)) else {
            return Err(format!("seed {seed}: empty set (root {root})"));
        };
        if (es.0 - em.0).abs() > step + 1e-12 || (es.1 - em.1).abs() > step + 1e-12 {
            return Err(format!("seed {seed}: Stampacchia {es:?} vs Minty {em:?} (root {root})"));
        }
    }
    within(Duration::from_secs(30), start, "20/20 endpoint pairs within one grid step".into())
}

fn c6_epsilon() -> Outcome {
    let start = Instant::now();
    let f = VExpr::parse("x1 - y1").unwrap();
    let grid = GridDomain::box_grid(&[0.0], &[10.0], 0.1).unwrap();
    let cone = PolyCone::orthant(1);
    let eps = [0.0, 0.25, 0.5, 1.0, 2.0];
    let mut sets = Vec::new();
    for e in eps {
        let spec = PerturbationSpec::new(e, vec![1.0], &cone, TOL).map_err(|e| e.to_string())?;
        sets.push(epsilon_equilibrium(&f, &spec, &grid, &cone, TOL).map_err(|e| e.to_string())?);
    }
    let (half, one) = (&sets[2], &sets[3]);
    if one.solutions.len() != 101 {
        return Err(format!("eps = 1 gives {} solutions", one.solutions.len()));
    }
    if half.solutions != vec![vec![10.0]] || !half.flags.iter().any(|f| f.contains("COERCIVITY")) {
        return Err(format!("eps = 1/2 gives {:?} with flags {:?}", half.solutions, half.flags));
    }
    if let Some(w) = sets.windows(2).position(|w| !w[0].is_subset_of(&w[1])) {
        return Err(format!("not monotone between eps = {} and {}", eps[w], eps[w + 1]));
    }
    let counts: Vec<usize> = sets.iter().map(|s| s.solutions.len()).collect();
    within(Duration::from_secs(5), start, format!("solution counts {counts:?}"))
}

fn c7_cone_algebra() -> Outcome {
    let start = Instant::now();
    let cones = [
        PolyCone::orthant(2),
        PolyCone::orthant(3),
        PolyCone::new(vec![vec![1.0, 1.0], vec![-1.0, 1.0]], "abs").unwrap(),
    ];
    for (k, cone) in cones.iter().enumerate() {
        if !cone.validate(TOL).is_valid() {
            return Err(format!("{} does not validate", cone.label()));
        }
        let m = |z: &[f64], r| cone.member(z, r, TOL).unwrap();
        let c1: Vec<Vec<f64>> = cone
            .sample(Region::InIntC, 20_000, 31 + k as u64)
            .unwrap()
            .into_iter()
            .filter(|c| cone.margin(c).unwrap() >= 10.0 * TOL)
            .take(10_000)
            .collect();
        let c2 = cone.sample(Region::InC, 10_000, 71 + k as u64).unwrap();
        if c1.len() < 10_000 {
            return Err(format!("{}: only {} interior samples", cone.label(), c1.len()));
        }
        for (a, b) in c1.iter().zip(&c2) {
            let s: Vec<f64> = a.iter().zip(b).map(|(p, q)| p + q).collect();
            if !m(&s, Region::InIntC) {
                return Err(format!("{}: {a:?} + {b:?} left int C", cone.label()));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(500 + k as u64);
        for _ in 0..10_000 {
            let z: Vec<f64> = (0..cone.dim()).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let consistent = (!m(&z, Region::InIntC) || m(&z, Region::InC))
                && (!m(&z, Region::InNegIntC) || m(&z, Region::InNegC));
            if !consistent || (m(&z, Region::InIntC) && m(&z, Region::InNegIntC)) {
                return Err(format!("{}: invariant broken at {z:?}", cone.label()));
            }
        }
    }
    within(Duration::from_secs(5), start, "3 cones x 10^4 pairs and vectors".into())
}

fn c8_perturbation_lemma() -> Outcome {
    let start = Instant::now();
    let grid = GridDomain::box_grid(&[-1.0], &[1.0], 0.5).unwrap();
    let sampling = SubsetSampling::default();
    let weights = pair_weights(7, 0);
    let cases = [
        ("y1 - x1", ["0", "(x1 - y1) * (x1 - y1)", "abs(x1 - y1)"], 1),
        (
            "(y1 - x1, y1 - x1)",
            ["(0, 0)", "((x1 - y1) * (x1 - y1), (x1 - y1) * (x1 - y1))", "(abs(x1 - y1), abs(x1 - y1))"],
            2,
        ),
    ];
    let mut applied = 0;
    for (f, gs, m) in cases {
        let cone = PolyCone::orthant(m);
        let f = VExpr::parse(f).unwrap();
        for g in gs {
            let g = VExpr::parse(g).unwrap();
            let run = || -> Result<(bool, bool), String> {
                let e = |e: veq_core::conditions::CheckError| e.to_string();
                let hyp = check_essential_quasimonotone(&f, &grid, &cone, &sampling, TOL).map_err(e)?.is_ok()
                    && check_c_convex(Slice::Raw, &g, &grid, &cone, &weights, TOL).map_err(e)?.is_ok()
                    && check_diagonal(&g, &grid, DiagonalMode::InC, &cone, TOL).map_err(e)?.is_ok();
                let f1 = VExpr::perturbed_trifunction(&f, &g).ok_or("dimension mismatch")?;
                let kkm = check_kkm(&f1, KkmForm::Primal, &grid, &sampling, &cone, TOL).map_err(e)?.is_ok();
                Ok((hyp, kkm))
            };
            let (hyp, kkm) = run()?;
            if hyp {
                applied += 1;
                if !kkm {
                    return Err(format!("hypotheses hold but KKM fails for g = {g} on R^{m}_+"));
                }
            }
        }
    }
    within(Duration::from_secs(30), start, format!("hypotheses held in {applied}/6 cases, KKM passed in each"))
}

fn ref_f31(x: f64) -> f64 {
    if x <= -0.5 {
        -2.0 * x - 1.0
    } else if x <= 0.0 {
        2.0 * x + 1.0
    } else {
        -2.0 * x + 1.0
    }
}

fn ref_g31(x: f64) -> f64 {
    if x <= 0.5 {
        -2.0 / 3.0 * x + 1.0 / 3.0
    } else {
        -2.0 * x + 1.0
    }
}

fn ref_ex31(x: f64, y: f64, z: f64) -> [f64; 2] {
    let v = (ref_f31(y) - ref_f31(x)) * ref_g31(z);
    [v, v]
}

fn ref_ex32(x: f64, y: f64, z: f64) -> [f64; 2] {
    if x <= 0.5 {
        [x + y, 2.0 * x - z]
    } else {
        [2.0 * x + y, z - x]
    }
}

fn c9_parser_fidelity() -> Outcome {
    let start = Instant::now();
    let cases: [(FixtureId, fn(f64, f64, f64) -> [f64; 2]); 2] = [(FixtureId::Ex31F, ref_ex31), (FixtureId::Ex32F, ref_ex32)];
    let mut worst = 0f64;
    for (k, (id, reference)) in cases.into_iter().enumerate() {
        let f = fixture(id, &FixtureParams::new()).unwrap();
        let [lo, hi] = id.domain().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(900 + k as u64);
        for _ in 0..1000 {
            let (x, y, z) = (rng.gen_range(lo..=hi), rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
            let got = f.eval(&[x], &[y], &[z]).map_err(|e| e.to_string())?;
            let want = reference(x, y, z);
            let err = got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
            if err > 1e-12 {
                return Err(format!("{id} at ({x}, {y}, {z}): {got:?} vs {want:?}"));
            }
            worst = worst.max(err);
        }
    }
    within(Duration::from_secs(1), start, format!("2 x 1000 points, max error {worst:e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 ex31 reproduction", c1_ex31),
        ("2 ex32 reproduction", c2_ex32),
        ("3 pseudomonotone primal in dual", c3_pseudomonotone),
        ("4 scalar oracle equivalence", c4_scalar_oracle),
        ("5 VVI coincidence", c5_vvi),
        ("6 epsilon-equilibrium", c6_epsilon),
        ("7 cone algebra", c7_cone_algebra),
        ("8 perturbation lemma", c8_perturbation_lemma),
        ("9 parser fidelity", c9_parser_fidelity),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {}/9 passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
