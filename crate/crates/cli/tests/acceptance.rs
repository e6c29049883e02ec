//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::LN_2;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use hh_interval::bounds::{
    chain_basic, chain_product_left, chain_product_right, chain_refined, ChainSettings,
    TERM_DELTA1, TERM_DELTA2, TERM_I, TERM_L, TERM_LHS, TERM_M, TERM_N, TERM_R, TERM_RHS,
};
use hh_interval::harmonic::{certify_sx, Verdict, WeightFunction};
use hh_interval::interval::Interval as Iv;
use hh_interval::quadrature::{integrate_iv, riemann_sum_oracle, QuadratureSpec, RiemannTag};
use hh_interval::{ChainReport, HarmonicDomain, IVFunction, Interval};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL_QUAD: f64 = 1e-9;
const TOL_ARITH: f64 = 1e-12;
const TOL_EQUALITY: f64 = 1e-9;
const TOL_CHAIN: f64 = 1e-9;
const TOL_RIEMANN: f64 = 1e-6;
const TOL_DISTRIBUTIVE: f64 = 1e-12;
const RIEMANN_N: usize = 1_000_000;
const LIMIT_BASIC: Duration = Duration::from_secs(1);
const LIMIT_CERTIFY: Duration = Duration::from_secs(5);
const CERTIFY_N: usize = 64;
const FUZZ_N: usize = 32;
const FUZZ_MEMBERS: usize = 200;
const PROPERTY_CASES: usize = 10_000;
const SEED: u64 = 0x5eed_4848;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dom() -> HarmonicDomain {
    HarmonicDomain::new(1.0, 2.0).unwrap()
}

fn ivf(lo: &str, hi: &str) -> IVFunction {
    IVFunction::parse(lo, hi, dom()).unwrap()
}

fn close(got: Interval, lo: f64, hi: f64, tol: f64, name: &str) -> Result<(), String> {
    ensure(
        (got.lo() - lo).abs() <= tol && (got.hi() - hi).abs() <= tol,
        || format!("{name} = {got}, expected [{lo}, {hi}] within {tol:e}"),
    )
}

fn term(r: &ChainReport, name: &str) -> Result<Interval, String> {
    r.term(name).ok_or_else(|| format!("term {name} missing"))
}

fn strict(r: &ChainReport) -> Result<(), String> {
    ensure(r.all_hold_strict(), || {
        format!("inclusions not strict: {:?}", r.inclusions)
    })
}

fn settings() -> ChainSettings<f64> {
    ChainSettings::default()
}

fn basic_instance() -> Check {
    let f = ivf("x", "5 - x");
    let start = Instant::now();
    let r = chain_basic(&f, &WeightFunction::Linear, &settings()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    close(term(&r, TERM_L)?, 4.0 / 3.0, 11.0 / 3.0, TOL_ARITH, "L")?;
    close(
        term(&r, TERM_I)?,
        2.0 * LN_2,
        5.0 - 2.0 * LN_2,
        TOL_QUAD,
        "I",
    )?;
    close(term(&r, TERM_R)?, 1.5, 3.5, TOL_ARITH, "R")?;
    strict(&r)?;
    ensure(elapsed < LIMIT_BASIC, || format!("took {elapsed:?}"))?;
    Ok(format!("I = {}, {elapsed:.2?}", term(&r, TERM_I)?))
}

fn refined_instance() -> Check {
    let r = chain_refined(&ivf("x", "5 - x"), &WeightFunction::Linear, &settings())
        .map_err(|e| e.to_string())?;
    close(
        term(&r, TERM_DELTA1)?,
        48.0 / 35.0,
        127.0 / 35.0,
        TOL_ARITH,
        "Delta1",
    )?;
    close(
        term(&r, TERM_DELTA2)?,
        17.0 / 12.0,
        43.0 / 12.0,
        TOL_ARITH,
        "Delta2",
    )?;
    ensure(r.inclusions.len() == 4, || {
        "expected four inclusions".into()
    })?;
    strict(&r)?;
    Ok("five-term chain strict".into())
}

fn equality_family() -> Check {
    let f = ivf("1/x", "2/x");
    let mut worst = 0.0f64;
    for r in [
        chain_basic(&f, &WeightFunction::Linear, &settings()),
        chain_refined(&f, &WeightFunction::Linear, &settings()),
    ] {
        let r = r.map_err(|e| e.to_string())?;
        for t in &r.terms {
            close(t.value, 0.75, 1.5, TOL_EQUALITY, &t.name)?;
        }
        worst = worst.max(r.max_gap());
        ensure(r.max_gap() <= TOL_EQUALITY, || {
            format!("gap {}", r.max_gap())
        })?;
    }
    Ok(format!("max gap {worst:e}"))
}

fn product_pair() -> (IVFunction, IVFunction) {
    (ivf("x", "5 - x"), ivf("x", "5 - x"))
}

fn product_right_instance() -> Check {
    let (f, g) = product_pair();
    let h = WeightFunction::Linear;
    let r = chain_product_right(&f, &g, &h, &h, &settings()).map_err(|e| e.to_string())?;
    let m = term(&r, TERM_M)?;
    let n = term(&r, TERM_N)?;
    ensure(m == Iv::new(5.0, 25.0).unwrap(), || format!("M = {m}"))?;
    ensure(n == Iv::new(4.0, 24.0).unwrap(), || format!("N = {n}"))?;
    close(term(&r, TERM_RHS)?, 7.0 / 3.0, 37.0 / 3.0, TOL_ARITH, "RHS")?;
    close(term(&r, TERM_I)?, 2.0, 27.0 - 20.0 * LN_2, TOL_QUAD, "I_fg")?;
    strict(&r)?;
    Ok(format!("I_fg = {}", term(&r, TERM_I)?))
}

fn product_left_instance() -> Check {
    let (f, g) = product_pair();
    let h = WeightFunction::Linear;
    let r = chain_product_left(&f, &g, &h, &h, &settings()).map_err(|e| e.to_string())?;
    close(
        term(&r, TERM_LHS)?,
        32.0 / 9.0,
        242.0 / 9.0,
        TOL_ARITH,
        "LHS",
    )?;
    let ifg_hi = 27.0 - 20.0 * LN_2;
    close(
        term(&r, TERM_RHS)?,
        2.0 + 5.0 / 6.0 + 4.0 / 3.0,
        ifg_hi + 25.0 / 6.0 + 8.0,
        TOL_QUAD,
        "RHS",
    )?;
    strict(&r)?;
    Ok(format!("RHS = {}", term(&r, TERM_RHS)?))
}

fn power_coefficients() -> Check {
    let f = ivf("x", "5 - x");
    for s in [0.25, 0.5, 0.75, 1.0] {
        let h = WeightFunction::power(s).map_err(|e| e.to_string())?;
        let r = chain_basic(&f, &h, &settings()).map_err(|e| e.to_string())?;
        let left = r.coefficient("left").unwrap();
        let right = r.coefficient("right").unwrap();
        ensure((left - 2f64.powf(s - 1.0)).abs() <= TOL_ARITH, || {
            format!("s={s}: left {left}")
        })?;
        ensure((right - 1.0 / (s + 1.0)).abs() <= TOL_ARITH, || {
            format!("s={s}: right {right}")
        })?;
    }
    Ok("s in {0.25, 0.5, 0.75, 1}".into())
}

fn timed_certify(
    f: &IVFunction,
    h: &WeightFunction<f64>,
) -> Result<(hh_interval::Certificate, Duration), String> {
    let start = Instant::now();
    let c = certify_sx(f, h, CERTIFY_N).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    ensure(t < LIMIT_CERTIFY, || format!("certify took {t:?}"))?;
    Ok((c, t))
}

fn certifier() -> Check {
    let linear = WeightFunction::Linear;
    let mut slowest = Duration::ZERO;

    let (c, t) = timed_certify(&ivf("x", "5 - x"), &linear)?;
    slowest = slowest.max(t);
    ensure(c.verdict == Verdict::NoViolationAtResolution, || {
        "rejected [x, 5 - x]".into()
    })?;

    let f = ivf("x", "x^2 + 1");
    let (c, t) = timed_certify(&f, &linear)?;
    slowest = slowest.max(t);
    let w = c.witness.ok_or("accepted [x, x^2 + 1]")?;
    ensure(
        !w.inclusion_holds(&f, &linear, c.direction)
            .map_err(|e| e.to_string())?,
        || "witness inclusion holds on recomputation".into(),
    )?;

    for (lo, hi) in [
        ("x", "5 - x"),
        ("1/x", "2/x"),
        ("2.5", "2.5"),
        ("x^2", "x^2 + 3"),
        ("0.1", "exp(x)"),
    ] {
        let (c, t) = timed_certify(&ivf(lo, hi), &WeightFunction::Constant)?;
        slowest = slowest.max(t);
        let w = c
            .witness
            .ok_or_else(|| format!("h = 1 accepted [{lo}, {hi}]"))?;
        ensure(w.t == 0.0 || w.t == 1.0, || {
            format!("h = 1 witness at t = {}", w.t)
        })?;
    }
    Ok(format!("N = {CERTIFY_N}, slowest {slowest:.2?}"))
}

fn random_interval(rng: &mut ChaCha8Rng) -> Interval {
    let lo = rng.gen_range(-100.0..100.0);
    Iv::new(lo, lo + rng.gen_range(0.0..50.0)).unwrap()
}

fn random_subinterval(rng: &mut ChaCha8Rng, outer: Interval) -> Interval {
    let (p, q): (f64, f64) = (rng.gen(), rng.gen());
    let (p, q) = (p.min(q), p.max(q));
    let lo = outer.lo() + p * outer.width();
    let hi = (outer.lo() + q * outer.width()).clamp(lo, outer.hi());
    Iv::new(lo, hi).unwrap()
}

fn away_from_zero(rng: &mut ChaCha8Rng) -> Interval {
    let v = random_interval(rng);
    let shift = if rng.gen() {
        -v.hi() - 0.5
    } else {
        -v.lo() + 0.5
    };
    Iv::new(v.lo() + shift, v.hi() + shift).unwrap()
}

fn interval_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    type Op = fn(&Interval, &Interval) -> Result<Interval, hh_interval::IntervalError>;
    let ops: [(&str, Op); 4] = [
        ("+", Interval::checked_add),
        ("-", Interval::checked_sub),
        ("*", Interval::checked_mul),
        ("/", Interval::checked_div),
    ];
    for (name, op) in ops {
        for _ in 0..PROPERTY_CASES {
            let u2 = random_interval(&mut rng);
            let v2 = if name == "/" {
                away_from_zero(&mut rng)
            } else {
                random_interval(&mut rng)
            };
            let (u, v) = (
                random_subinterval(&mut rng, u2),
                random_subinterval(&mut rng, v2),
            );
            let inner = op(&u, &v).map_err(|e| e.to_string())?;
            let outer = op(&u2, &v2).map_err(|e| e.to_string())?;
            ensure(inner.subset_of(&outer, 0.0), || {
                format!("isotonicity {name}: {u} {v} in {u2} {v2}")
            })?;
        }
    }
    for _ in 0..PROPERTY_CASES {
        let (u, v, w) = (
            random_interval(&mut rng),
            random_interval(&mut rng),
            random_interval(&mut rng),
        );
        let ok = u.hausdorff(&v) == v.hausdorff(&u)
            && u.hausdorff(&u) == 0.0
            && (u.hausdorff(&v) == 0.0) == (u == v)
            && u.hausdorff(&w) <= u.hausdorff(&v) + v.hausdorff(&w) + TOL_ARITH;
        ensure(ok, || format!("metric axioms at {u} {v} {w}"))?;
    }
    for _ in 0..PROPERTY_CASES {
        let (a, b): (f64, f64) = (rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0));
        let (pa, pb) = (Iv::point(a).unwrap(), Iv::point(b).unwrap());
        let ok = pa.checked_add(&pb).unwrap() == Iv::point(a + b).unwrap()
            && pa.checked_sub(&pb).unwrap() == Iv::point(a - b).unwrap()
            && pa.checked_mul(&pb).unwrap() == Iv::point(a * b).unwrap()
            && (b == 0.0 || pa.checked_div(&pb).unwrap() == Iv::point(a / b).unwrap());
        ensure(ok, || format!("degenerate embedding at {a}, {b}"))?;
    }
    for _ in 0..PROPERTY_CASES {
        let (u, v) = (random_interval(&mut rng), random_interval(&mut rng));
        let lambda: f64 = rng.gen_range(-10.0..10.0);
        let lhs = u.checked_add(&v).unwrap().scale(lambda).unwrap();
        let rhs = u
            .scale(lambda)
            .unwrap()
            .checked_add(&v.scale(lambda).unwrap())
            .unwrap();
        let scale = lhs.lo().abs().max(lhs.hi().abs()).max(1.0);
        ensure(lhs.hausdorff(&rhs) <= TOL_DISTRIBUTIVE * scale, || {
            format!("distributivity: {lambda} ({u} + {v}) = {lhs} vs {rhs}")
        })?;
    }
    Ok(format!(
        "{PROPERTY_CASES} cases per property, seed {SEED:#x}"
    ))
}

fn quadrature_oracle() -> Check {
    let spec = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for (lo, hi) in [
        ("x", "5 - x"),
        ("1/x", "2/x"),
        ("2.5", "2.5"),
        ("x^2", "x^2 + 3"),
    ] {
        let f = ivf(lo, hi);
        let q = integrate_iv(&f, 1.0, 2.0, &spec).map_err(|e| e.to_string())?;
        let r = riemann_sum_oracle(&f, 1.0, 2.0, RIEMANN_N, RiemannTag::Midpoint)
            .map_err(|e| e.to_string())?;
        let d = q.hausdorff(&r);
        worst = worst.max(d);
        ensure(d <= TOL_RIEMANN, || format!("[{lo}, {hi}]: {q} vs {r}"))?;
    }
    Ok(format!("max distance {worst:e}"))
}

fn conditional_soundness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xf022);
    let h = WeightFunction::Linear;
    let (mut passing, mut tried) = (0, 0);
    while passing < FUZZ_MEMBERS {
        tried += 1;
        ensure(tried <= 20 * FUZZ_MEMBERS, || {
            format!("only {passing} members certified")
        })?;
        // some members have α < 0 or δ < 0 and are expected to fail certification
        let alpha: f64 = rng.gen_range(-0.5..2.0);
        let delta: f64 = rng.gen_range(-0.5..1.0);
        let beta = (-2.0 * alpha).max(0.0) + rng.gen_range(0.1..2.0);
        let gamma = beta + 2.0 * (alpha.abs() + delta.abs()) + rng.gen_range(0.1..3.0);
        let f = ivf(
            &format!("{alpha} * x + {beta}"),
            &format!("{gamma} - {delta} * x"),
        );
        if certify_sx(&f, &h, FUZZ_N)
            .map_err(|e| e.to_string())?
            .is_violation()
        {
            continue;
        }
        passing += 1;
        let s = ChainSettings {
            tol: TOL_CHAIN,
            ..settings()
        };
        for r in [chain_basic(&f, &h, &s), chain_refined(&f, &h, &s)] {
            let r = r.map_err(|e| e.to_string())?;
            ensure(r.all_hold_tol(), || {
                format!(
                    "counterexample α={alpha} β={beta} γ={gamma} δ={delta}: {:?}",
                    r.inclusions
                )
            })?;
        }
    }
    Ok(format!(
        "{passing} certified members of {tried} drawn, zero counterexamples"
    ))
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn hhiv(args: &[&str], stdin: &str) -> Result<(i32, String), String> {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_hhiv"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| e.to_string())?;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .map_err(|e| e.to_string())?;
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    Ok((
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    ))
}

fn cli_contract() -> Check {
    let read = |n: &str| std::fs::read_to_string(golden(n)).map_err(|e| format!("{n}: {e}"));
    let (code, out) = hhiv(
        &["enclose", "--config", "-", "--pretty"],
        &read("enclose_basic.config.json")?,
    )?;
    ensure(
        code == 0 && out == read("enclose_basic.report.json")?,
        || "enclose golden mismatch".into(),
    )?;
    let (code, out) = hhiv(&["sweep", "--config", "-"], &read("sweep_a.plan.json")?)?;
    ensure(code == 0 && out == read("sweep_a.csv")?, || {
        "sweep golden mismatch".into()
    })?;

    let basic = read("enclose_basic.config.json")?;
    let cases = [
        ("verify", basic.clone(), 0),
        ("verify", basic.replace("5 - x", "x^2 + 1"), 1),
        ("enclose", basic.replace("5 - x", "5 -"), 2),
        (
            "enclose",
            basic.replace("\"linear\"", "\"expr\", \"text\": \"abs(t - 0.5)\""),
            3,
        ),
    ];
    for (cmd, cfg, want) in cases {
        let (code, _) = hhiv(&[cmd, "--config", "-"], &cfg)?;
        ensure(code == want, || {
            format!("{cmd}: exit {code}, expected {want}")
        })?;
    }
    Ok("golden enclose, golden sweep, exit codes 0/1/2/3".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("basic chain worked instance", basic_instance),
        ("refined chain worked instance", refined_instance),
        ("reciprocal equality family", equality_family),
        (
            "product chain (right) worked instance",
            product_right_instance,
        ),
        (
            "product chain (left) worked instance",
            product_left_instance,
        ),
        ("power-weight coefficients", power_coefficients),
        ("certifier soundness and sensitivity", certifier),
        ("interval core properties", interval_properties),
        ("quadrature vs midpoint Riemann oracle", quadrature_oracle),
        ("conditional soundness fuzz", conditional_soundness),
        ("CLI contract", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
