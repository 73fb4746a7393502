//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Set `MOONSHINE_FULL_TABLE` to a complete character table to run the
//! full-table criterion; otherwise its fallback checks run instead.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use moonshine::chartab::{adams_tower_trace, decompose_series, nonnegativity_audit, CharacterTable};
use moonshine::distrib::{delta_limit, main_term_m, proportion_table, quantum_dimension};
use moonshine::modgroup::*;
use moonshine::qseries::*;
use moonshine::rademacher::*;
use moonshine::real::{BigReal, Real};
use moonshine_cli::commands::{self, tower_traces, RunConfig};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const TABLE2: [[&str; 3]; 4] = [
    ["196883.661", "333202640598.254", "22567393309593598.047"],
    ["196883.881", "333202640599.429", "22567393309593598.660"],
    ["196883.840", "333202640599.828", "22567393309593599.369"],
    ["196883.958", "333202640599.827", "22567393309593599.681"],
];

const TABLE3: [[&str; 3]; 4] = [
    ["51.975", "4760.372", "0.107"],
    ["52.003", "4759.860", "0.117"],
    ["52.041", "4760.066", "0.092"],
    ["51.894", "4760.049", "0.040"],
];

/// Three-decimal strings compared in units of the last printed digit.
fn milli(s: &str) -> i128 {
    let (i, f) = s.split_once('.').unwrap();
    let f = format!("{f:0<3}");
    let v: i128 = format!("{}{}", i.trim_start_matches('-'), &f[..3]).parse().unwrap();
    if s.starts_with('-') {
        -v
    } else {
        v
    }
}

fn convergence_grid(class: &str, printed: &[[&str; 3]; 4]) -> Outcome {
    let cfg = RunConfig { class: Some(class.into()), n: vec![1, 5, 10], cmax: vec![25, 50, 75, 100], ..Default::default() };
    let r = commands::convergence(&cfg).map_err(|e| e.to_string())?;
    let mut worst = 0;
    for (row, want) in r.rows.iter().zip(printed) {
        for (got, w) in row[1..].iter().zip(want) {
            let d = (milli(got) - milli(w)).abs();
            ensure!(d <= 1, "{class} {}: {got} vs printed {w}", row[0]);
            worst = worst.max(d);
        }
    }
    Ok(format!("12 entries, worst deviation {worst} in the third decimal"))
}

fn criterion_1() -> Outcome {
    convergence_grid("1A", &TABLE2)
}

fn criterion_2() -> Outcome {
    let grid = convergence_grid("4B", &TABLE3)?;
    let syms = load_monster_symbols().unwrap();
    let (t, cert) = rounded_tg_series(&syms["4B"], 12, &PrecisionConfig::default()).map_err(|e| e.to_string())?;
    let exact: Vec<BigInt> = [1, 5, 10].iter().map(|&n| t.coeff(n).unwrap()).collect();
    ensure!(exact == [BigInt::from(52), BigInt::from(4760), BigInt::zero()], "rounded 4B row {exact:?}");
    ensure!(cert.worst_distance() < 0.25, "distance {}", cert.worst_distance());
    Ok(format!("{grid}; exact row (52, 4760, 0), worst rounding distance {:.3}", cert.worst_distance()))
}

fn criterion_3() -> Outcome {
    let syms = load_monster_symbols().unwrap();
    let (t, cert) = rounded_tg_series(&syms["1A"], 20, &PrecisionConfig::default()).map_err(|e| e.to_string())?;
    ensure!(t == j_series(20), "rounded series differs from J");
    Ok(format!("q^-1..q^18 exact, worst rounding distance {:.3}", cert.worst_distance()))
}

fn criterion_4() -> Outcome {
    let checked = mahler_check(&j_series(804)).map_err(|v| format!("recursion fails at n = {}", v.n))?;
    ensure!(checked.last() == Some(&200), "checked through {:?}", checked.last());
    ensure!(denominator_identity_residual(6, 6).is_zero(), "denominator identity residual nonzero");
    let j = j_series(40);
    for m in 1..=5u32 {
        let f = faber_tower(&j, m).map_err(|e| e.to_string())?;
        let h = hecke_tower_dims(m as u64, 30);
        let order = h.order().min(f.series.order());
        ensure!(f.series.truncate(order) == h.truncate(order), "Faber and Hecke differ at m = {m}");
    }
    Ok("Mahler n ≤ 200, residual(6,6) = 0, Faber = Hecke for m ≤ 5".into())
}

fn criterion_5() -> Outcome {
    let cs = cusps_of_gamma0(8);
    let got: Vec<(String, i64)> = cs.iter().map(|c| (c.cusp.to_string(), c.width)).collect();
    let want = [("∞", 1), ("0", 8), ("1/2", 2), ("1/4", 1)];
    ensure!(got.iter().map(|(c, w)| (c.as_str(), *w)).eq(want), "Γ_0(8) cusps {got:?}");
    let poles = pole_cusps(&parse_group_symbol("4||2+").unwrap());
    let eps: Vec<String> = poles.iter().map(|p| p.pole.eps.to_string()).collect();
    ensure!(eps == ["1", "1", "i", "-1"], "4B ε values {eps:?}");
    for n in 1..=30 {
        let total: i64 = cusps_of_gamma0(n).iter().map(|c| c.width).sum();
        ensure!(total == gamma0_index(n), "width sum at N = {n}");
    }
    Ok("cusps {∞, 0, 1/2, 1/4}, widths {1, 8, 2, 1}, ε = (1, 1, i, -1); width sums N ≤ 30".into())
}

fn criterion_6() -> Outcome {
    let cfg = RunConfig { n_max: Some(4), ..Default::default() };
    let r = commands::multiplicities(&cfg).map_err(|e| e.to_string())?;
    let want: [(i64, &str, &[i64]); 4] = [
        (1, "196884", &[1, 1]),
        (2, "21493760", &[1, 1, 1]),
        (3, "864299970", &[2, 2, 1, 1]),
        (4, "20245856256", &[2, 3, 2, 1, 0, 1]),
    ];
    for (n, dim, ms) in want {
        let key = n.to_string();
        ensure!(r.cell(&key, "dimension") == Some(dim), "dimension at n = {n}");
        for i in 1..=10usize {
            let w = ms.get(i - 1).copied().unwrap_or(0).to_string();
            let col = format!("m_{i}");
            ensure!(r.cell(&key, &col) == Some(w.as_str()), "m_{i} at n = {n}: {:?}", r.cell(&key, &col));
        }
    }
    Ok("n = 1..4 exact, including 20245856256 = 2χ1 + 3χ2 + 2χ3 + χ4 + χ6".into())
}

fn criterion_7() -> Outcome {
    let t = CharacterTable::bundled().map_err(|e| e.to_string())?;
    let total: BigInt = "5844076785304502808013602136".parse().unwrap();
    let want = [(1, "1", "1.711e-28"), (2, "196883", "3.368e-23"), (194, "258823477531055064045234375", "0.04428")];
    for (i, num, dec) in want {
        let d = delta_limit(&t, i).map_err(|e| e.to_string())?;
        ensure!(d.value == BigRational::new(num.parse().unwrap(), total.clone()), "δ_{i} = {}", d.value);
        ensure!(d.decimal == dec, "δ_{i} renders as {}", d.decimal);
    }
    Ok("δ_1, δ_2, δ_194 exact; 1.711e-28, 3.368e-23, 0.04428".into())
}

/// `printed` is a truncated decimal such as "4.011e-4".
fn agrees_with_printed(v: &BigRational, printed: &str) -> bool {
    let (mant, exp) = printed.split_once('e').unwrap_or((printed, "0"));
    let exp: i32 = exp.parse().unwrap();
    let digits = mant.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
    let scale = exp - digits;
    let m: BigInt = mant.replace('.', "").parse().unwrap();
    let pow = |k: i32| {
        if k >= 0 {
            BigRational::from_integer(BigInt::from(10).pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), BigInt::from(10).pow((-k) as u32))
        }
    };
    let lo = BigRational::from_integer(m) * pow(scale);
    let ulp = pow(scale);
    &lo - &ulp <= *v && *v < lo + ulp.clone() + ulp
}

fn criterion_8_full(path: &str) -> Outcome {
    let table = CharacterTable::load(std::path::Path::new(path)).map_err(|e| e.to_string())?;
    ensure!(table.is_complete(), "{path} is not a complete table");
    let symbols = load_monster_symbols().unwrap();
    let pc = PrecisionConfig::default().with_c_max(1600);
    let t0 = Instant::now();
    let traces = tower_traces(&table, &symbols, 1, 200, &pc).map_err(|e| e.to_string())?;
    let ds = decompose_series(&table, 1, &traces, 200).map_err(|e| e.to_string())?;

    let p = proportion_table(&table, 1, &ds, &[1, 2, 194]).map_err(|e| e.to_string())?;
    let printed: [(i64, [&str; 3]); 11] = [
        (40, ["4.011e-4", "2.514e-3", "0.00891"]),
        (60, ["2.699e-9", "2.732e-8", "0.04419"]),
        (80, ["4.809e-14", "7.537e-13", "0.04428"]),
        (100, ["4.427e-18", "1.077e-16", "0.04428"]),
        (120, ["1.377e-21", "5.501e-20", "0.04428"]),
        (140, ["1.156e-24", "1.260e-22", "0.04428"]),
        (160, ["2.621e-27", "3.443e-23", "0.04428"]),
        (180, ["1.877e-28", "3.371e-23", "0.04428"]),
        (200, ["1.715e-28", "3.369e-23", "0.04428"]),
        (1, ["0.5", "0.5", "0"]),
        (2, ["0.3333", "0.3333", "0"]),
    ];
    let mut later_rows = Vec::new();
    for (n, want) in printed {
        let row = p.rows.iter().find(|r| r.n == n).unwrap();
        for (d, w) in row.deltas.iter().zip(want) {
            let v = d.clone().unwrap();
            let ok = if w == "0" { v.is_zero() } else { agrees_with_printed(&v, w) };
            if n <= 40 {
                ensure!(ok, "Table row n = {n}: {v} vs printed {w}");
            } else if !ok {
                later_rows.push(format!("n = {n} ({w})"));
            }
        }
    }
    ensure!(p.rows[0].n == -1 && p.rows[0].deltas[0] == Some(BigRational::one()), "row n = -1");

    let mut audited = nonnegativity_audit(&table, &ds[..22]);
    ensure!(audited.passed(), "m = 1: {:?}", audited.violations);
    let mut two = BTreeMap::new();
    for class in &table.classes {
        let coeffs = (-2..=20)
            .map(|n| adams_tower_trace(&table, &class.name, 2, n, &traces))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        two.insert(class.name.clone(), ZSeries::new(-2, coeffs));
    }
    let ds2 = decompose_series(&table, 2, &two, 20).map_err(|e| e.to_string())?;
    let a2 = nonnegativity_audit(&table, &ds2);
    ensure!(a2.passed(), "m = 2: {:?}", a2.violations);
    audited.checked += a2.checked;

    let q = quantum_dimension(&table, 2, &ds).map_err(|e| e.to_string())?;
    ensure!(q.relative_gap < 0.01, "d_2(200) = {} is {:.2}% from 196883", q.last, 100.0 * q.relative_gap);
    let mut note = format!(
        "rows n = 1, 2, 40 reproduced; audit of {} pieces passed; d_2(200) = {:.1} ({:.3}% gap); {:.0}s",
        audited.checked,
        q.last,
        100.0 * q.relative_gap,
        t0.elapsed().as_secs_f64()
    );
    if !later_rows.is_empty() {
        note.push_str(&format!("; rows beyond the criterion differ from print: {}", later_rows.join(", ")));
    }
    Ok(note)
}

fn criterion_8_fallback() -> Outcome {
    let t = CharacterTable::bundled().map_err(|e| e.to_string())?;
    let bits = 256;
    let j = j_series(202);
    let c = BigReal::from_bigint(&j.coeff(200).unwrap(), bits);
    let mut main = BigReal::from_i64(0, bits);
    for i in 1..=194 {
        let term: BigReal = main_term_m(&t, i, 1, 200, bits).map_err(|e| e.to_string())?;
        main = main + BigReal::from_bigint(t.dim(i), bits) * term;
    }
    let ratio = (c / main).to_f64();
    ensure!((ratio - 1.0).abs() < 0.05, "c(200)/main term = {ratio}");
    Ok(format!("no MOONSHINE_FULL_TABLE: fallback c(200)/Σ dim·main term = {ratio:.5}; criteria 4-6 cover the rest"))
}

fn criterion_8() -> Outcome {
    match std::env::var("MOONSHINE_FULL_TABLE") {
        Ok(path) => criterion_8_full(&path),
        Err(_) => criterion_8_fallback(),
    }
}

fn criterion_9() -> Outcome {
    // Kloosterman sums against the double loop over (a, d)
    let tau = 2.0 * std::f64::consts::PI;
    for c in 1..=50i64 {
        for (m, n) in [(-1, 1), (-2, 3), (-5, 5), (1, -4), (0, 2)] {
            let mut direct = Complex::new(0.0, 0.0);
            for a in 0..c {
                for d in 0..c {
                    if c == 1 || (a * d - 1).rem_euclid(c) == 0 {
                        direct += Complex::from_polar(1.0, tau * (m * a + n * d) as f64 / c as f64);
                    }
                }
            }
            let k: Complex<f64> =
                kloosterman_sum(MultiplierSystem::Trivial, 1, &IntMatrix::IDENTITY, Q::from(m), Q::from(n), c, 53).unwrap();
            ensure!((k - direct).norm() < 1e-9, "Kloosterman c = {c}, m = {m}, n = {n}");
        }
    }
    // η multiplier cocycle on a grid of SL2(Z) matrices
    let mats: Vec<IntMatrix> = vec![
        IntMatrix::S,
        IntMatrix::t(1),
        IntMatrix::new(1, 0, 1, 1),
        IntMatrix::new(2, 1, 1, 1),
        IntMatrix::new(1, 1, 2, 3),
        IntMatrix::new(-1, 0, -3, -1),
        IntMatrix::new(3, 1, 5, 2),
        IntMatrix::new(5, -2, 13, -5),
    ];
    let z = Complex::new(0.3, 0.7);
    let j = |m: &IntMatrix, z: Complex<f64>| {
        let n = normalize_sign(m);
        (z * n.c as f64 + n.d as f64).sqrt()
    };
    let act = |m: &IntMatrix, z: Complex<f64>| (z * m.a as f64 + m.b as f64) / (z * m.c as f64 + m.d as f64);
    let root = |r: RootOfUnity| {
        let (re, im) = r.to_f64();
        Complex::new(re, im)
    };
    for a in &mats {
        for b in &mats {
            let p = a.mul(b);
            let lhs = root(eta_multiplier(&p)) * j(&p, z);
            let rhs = root(eta_multiplier(a)) * root(eta_multiplier(b)) * j(a, act(b, z)) * j(b, z);
            ensure!((lhs - rhs).norm() < 1e-9, "η cocycle for {a:?}, {b:?}");
        }
    }
    // Bessel: ascending series against the closed form for order 1/2
    let bits = 256;
    for x in [1i64, 20, 150] {
        let xr = BigReal::from_i64(x, bits);
        let series = bessel_i(Q::new(1, 2), &xr).map_err(|e| e.to_string())?;
        let two = BigReal::from_i64(2, bits);
        let closed = (two.clone() / (BigReal::pi(bits) * xr.clone())).sqrt() * (xr.exp() - (-xr).exp()) / two;
        ensure!(((series - closed.clone()) / closed).abs() < BigReal::epsilon(bits - 8), "I_1/2({x})");
    }
    // σ_g on the generators of each eigengroup
    let syms = load_monster_symbols().unwrap();
    let mut groups = 0;
    for s in syms.values().filter(|s| s.h > 1) {
        let h = s.h as i64;
        let t = EigengroupElement::new(s, 1, 1, 0, 1, 1).map_err(|e| e.to_string())?;
        let v = EigengroupElement::new(s, 1, 0, 1, 1, 1).map_err(|e| e.to_string())?;
        let g0 = EigengroupElement::new(s, 1, 0, h, 1, 1).map_err(|e| e.to_string())?;
        ensure!(sigma_g(s, &t).map_err(|e| e.to_string())? == RootOfUnity::new(-1, h), "σ(T) for {}", s.text());
        ensure!(sigma_g(s, &v).map_err(|e| e.to_string())? == RootOfUnity::new(-s.lambda(), h), "σ(V) for {}", s.text());
        ensure!(sigma_g(s, &g0).map_err(|e| e.to_string())? == RootOfUnity::one(), "σ on Γ_0(Nh) for {}", s.text());
        groups += 1;
    }
    // Adams operations against Faber polynomials on a power-closed set of classes
    let table = CharacterTable::bundled().map_err(|e| e.to_string())?;
    let small: BTreeMap<_, _> = syms.into_iter().filter(|(name, _)| table.class(name).unwrap().element_order <= 4).collect();
    let (base, _) = rounded_class_traces(&small, 1, 24, &PrecisionConfig::default().with_c_max(800)).map_err(|(s, e)| format!("{s}: {e}"))?;
    for (name, t) in &base {
        let f = faber_tower(t, 2).map_err(|e| e.to_string())?;
        for n in 1..=11 {
            let a = adams_tower_trace(&table, name, 2, n, &base).map_err(|e| e.to_string())?;
            ensure!(a == f.series.coeff(n).unwrap(), "Adams vs Faber for {name} at n = {n}");
        }
    }
    Ok(format!(
        "Kloosterman c ≤ 50, η cocycle on {} pairs, Bessel closed form, σ generators on {groups} groups, Adams = Faber on {} classes",
        mats.len() * mats.len(),
        base.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 identity-class convergence grid", criterion_1),
        ("2 class 4B convergence grid and exact row", criterion_2),
        ("3 rounded 1A series equals J", criterion_3),
        ("4 identities: Mahler, denominator, Faber/Hecke", criterion_4),
        ("5 cusps of Γ_0(8) and width sums", criterion_5),
        ("6 decompositions n = 1..4", criterion_6),
        ("7 limiting proportions", criterion_7),
        ("8 full-table distribution", criterion_8),
        ("9 property suites", criterion_9),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.1}s): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
