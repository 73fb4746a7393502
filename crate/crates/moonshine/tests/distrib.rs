use std::collections::BTreeMap;

use moonshine::chartab::{CharacterTable, ModuleDecomposition, BUNDLED_PARTIAL_TABLE};
use moonshine::distrib::*;
use moonshine::qseries::{j_series, ug_from_tg};
use moonshine::real::{BigReal, Real};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

const BITS: usize = 256;

fn table() -> CharacterTable {
    CharacterTable::from_json(BUNDLED_PARTIAL_TABLE).unwrap()
}

fn big(s: &str) -> BigInt {
    s.parse().unwrap()
}

fn rel(a: &BigReal, b: &BigReal) -> f64 {
    ((a.clone() - b.clone()) / b.clone()).abs().to_f64()
}

#[test]
fn limiting_proportions() {
    let t = table();
    let total = big("5844076785304502808013602136");
    let d1 = delta_limit(&t, 1).unwrap();
    assert_eq!(d1.value, BigRational::new(BigInt::one(), total.clone()));
    assert_eq!(d1.decimal, "1.711e-28");
    let d2 = delta_limit(&t, 2).unwrap();
    assert_eq!(d2.value, BigRational::new(BigInt::from(196883), total.clone()));
    assert_eq!(d2.decimal, "3.368e-23");
    let d194 = delta_limit(&t, 194).unwrap();
    assert_eq!(d194.value, BigRational::new(big("258823477531055064045234375"), total));
    assert_eq!(d194.decimal, "0.04428");
    let sum: BigRational = (1..=194).map(|i| delta_limit(&t, i).unwrap().value).sum();
    assert!(sum.is_one());
    assert_eq!(delta_limit(&t, 195), Err(DistribError::Index(195)));
}

#[test]
fn main_term_ratios() {
    let t = table();
    for n in [1, 10, 200] {
        let a: BigReal = main_term_m(&t, 1, 1, n, BITS).unwrap();
        let b: BigReal = main_term_m(&t, 2, 1, n, BITS).unwrap();
        assert!(rel(&(b / a), &BigReal::from_i64(196883, BITS)) < 1e-60);

        let a2: BigReal = main_term_m(&t, 1, 2, n, BITS).unwrap();
        let a1: BigReal = main_term_m(&t, 1, 1, n, BITS).unwrap();
        let nn = n as f64;
        let want = 2f64.powf(0.25) * (4.0 * std::f64::consts::PI * ((2.0 * nn).sqrt() - nn.sqrt())).exp();
        assert!(((a2 / a1).to_f64() / want - 1.0).abs() < 1e-12, "n = {n}");

        let x: BigReal = main_term_n(&t, 1, n, BITS).unwrap();
        let y: BigReal = main_term_n(&t, 194, n, BITS).unwrap();
        let d = BigReal::from_bigint(&big("258823477531055064045234375"), BITS);
        assert!(rel(&(y / x), &d) < 1e-60);
    }
}

/// Σ_i dim(χ_i)·main_term_m(i, 1, n): the χ-weighted main terms add up to
/// the leading behaviour of c(n).
fn weighted_main_term(t: &CharacterTable, n: i64) -> BigReal {
    (1..=194)
        .map(|i| BigReal::from_bigint(t.dim(i), BITS) * main_term_m::<BigReal>(t, i, 1, n, BITS).unwrap())
        .fold(BigReal::from_i64(0, BITS), |a, b| a + b)
}

#[test]
fn identity_class_trend() {
    let t = table();
    let j = j_series(202);
    let mut prev = f64::INFINITY;
    for n in [50, 100, 150, 200] {
        let c = BigReal::from_bigint(&j.coeff(n).unwrap(), BITS);
        let gap = (c / weighted_main_term(&t, n)).to_f64() - 1.0;
        assert!(gap.abs() < prev, "n = {n}: gap {gap}");
        prev = gap.abs();
        if n == 100 {
            assert!(gap.abs() < 0.10);
        }
    }
    assert!(prev < 0.05);
}

#[test]
fn highest_weight_main_term() {
    let t = table();
    let u = ug_from_tg(&j_series(60));
    let exact = BigReal::from_bigint(&u.coeff(50).unwrap(), BITS);
    let approx = (1..=194)
        .map(|i| BigReal::from_bigint(t.dim(i), BITS) * main_term_n::<BigReal>(&t, i, 50, BITS).unwrap())
        .fold(BigReal::from_i64(0, BITS), |a, b| a + b);
    assert!((exact / approx).to_f64() - 1.0 < 0.15);
}

fn complete(n: i64, m: &[(usize, i64)]) -> ModuleDecomposition {
    let mut multiplicities: BTreeMap<usize, BigInt> = (1..=194).map(|i| (i, BigInt::zero())).collect();
    for &(i, v) in m {
        multiplicities.insert(i, BigInt::from(v));
    }
    ModuleDecomposition { m: 1, n, dimension: BigInt::zero(), multiplicities }
}

#[test]
fn proportion_report() {
    let t = table();
    let ds = vec![complete(0, &[]), complete(1, &[(1, 1), (2, 1)]), complete(2, &[(1, 1), (2, 1), (3, 1)])];
    let p = proportion_table(&t, 1, &ds, &[1, 2, 194]).unwrap();
    assert_eq!(p.rows[0].deltas, vec![None, None, None]);
    assert_eq!(p.rows[1].deltas[0], Some(BigRational::new(1.into(), 2.into())));
    assert_eq!(p.rows[2].deltas[1], Some(BigRational::new(1.into(), 3.into())));

    let csv = p.to_csv(4);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,delta_1,delta_2,delta_194");
    assert_eq!(lines[1], format!("0,{UNDEFINED},{UNDEFINED},{UNDEFINED}"));
    assert_eq!(lines[2], "1,0.5000,0.5000,0");
    assert_eq!(lines[4], "inf,1.711e-28,3.368e-23,0.04428");
    assert!(p.to_text(4).starts_with("n "));
    let json: serde_json::Value = serde_json::to_value(&p).unwrap();
    assert_eq!(json["rows"][1]["deltas"][0], "1/2");

    let mut partial = ds[1].clone();
    partial.multiplicities.remove(&7);
    assert_eq!(proportion_table(&t, 1, &[partial], &[1]), Err(DistribError::Incomplete(1)));
}

#[test]
fn quantum_dimension_sequence() {
    let t = table();
    let ds = vec![complete(0, &[]), complete(1, &[(1, 1), (2, 1)]), complete(5, &[(1, 4), (2, 5), (3, 3)])];
    let q = quantum_dimension(&t, 2, &ds).unwrap();
    assert_eq!(q.sequence, vec![(1, 1.0), (5, 1.25)]);
    assert!((q.relative_gap - (196883.0 - 1.25) / 196883.0).abs() < 1e-15);
    let one = quantum_dimension(&t, 1, &ds).unwrap();
    assert!(one.sequence.iter().all(|&(_, v)| v == 1.0));
}

proptest! {
    #[test]
    fn proportions_sum_to_one(m in proptest::collection::vec(0i64..1000, 194)) {
        let t = table();
        let pairs: Vec<(usize, i64)> = m.iter().enumerate().map(|(k, &v)| (k + 1, v)).collect();
        let all: Vec<usize> = (1..=194).collect();
        let p = proportion_table(&t, 1, &[complete(3, &pairs)], &all).unwrap();
        let row = &p.rows[0];
        if row.total.is_zero() {
            prop_assert!(row.deltas.iter().all(Option::is_none));
        } else {
            let s: BigRational = row.deltas.iter().map(|d| d.clone().unwrap()).sum();
            prop_assert!(s.is_one());
        }
    }

    #[test]
    fn rendering_keeps_requested_digits(p in 1i64..1_000_000_000, q in 1i64..1_000_000_000, digits in 1usize..8) {
        let r = BigRational::new(p.into(), q.into());
        let s = format_sig(&r, digits);
        let mantissa: String = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect();
        let significant = mantissa.trim_start_matches('0');
        prop_assert!(significant.trim_end_matches('0').len() <= digits, "{s}");
        let parsed: f64 = s.parse().unwrap();
        let exact = r.to_f64().unwrap();
        prop_assert!(parsed <= exact * (1.0 + 1e-12));
        prop_assert!(1.0 - parsed / exact < 10f64.powi(1 - digits as i32));
    }
}
