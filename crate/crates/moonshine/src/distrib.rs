//! Asymptotic main terms and the limiting distribution of irreducibles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::chartab::{CharacterTable, ModuleDecomposition};
use crate::real::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DistribError {
    #[error("character index {0} is out of range")]
    Index(usize),
    #[error("decomposition at n = {0} lacks some of the 194 irreducibles")]
    Incomplete(i64),
}

fn check_index(table: &CharacterTable, i: usize) -> Result<(), DistribError> {
    if i == 0 || i > table.dims.len() {
        Err(DistribError::Index(i))
    } else {
        Ok(())
    }
}

/// dim(χ_i)·|m|^{1/4} / (√2·|n|^{3/4}·|M|) · e^{4π√|mn|}
pub fn main_term_m<T: Real>(table: &CharacterTable, i: usize, m: i64, n: i64, bits: usize) -> Result<T, DistribError> {
    check_index(table, i)?;
    let dim = T::from_bigint(table.dim(i), bits);
    let order = T::from_bigint(&table.group_order, bits);
    let (m, n) = (T::from_i64(m.abs(), bits), T::from_i64(n.abs(), bits));
    let four_pi = T::pi(bits).ldexp(2);
    let e = (four_pi * (m.clone() * n.clone()).sqrt()).exp();
    let den = T::from_i64(2, bits).sqrt() * n.pow_ratio(3, 4) * order;
    Ok(dim * m.pow_ratio(1, 4) * e / den)
}

/// √12·dim(χ_i) / (|24n+1|^{1/2}·|M|) · e^{(π/6)√(23|24n+1|)}
pub fn main_term_n<T: Real>(table: &CharacterTable, i: usize, n: i64, bits: usize) -> Result<T, DistribError> {
    check_index(table, i)?;
    let dim = T::from_bigint(table.dim(i), bits);
    let order = T::from_bigint(&table.group_order, bits);
    let y = T::from_i64((24 * n + 1).abs(), bits);
    let e = (T::pi(bits) / T::from_i64(6, bits) * (T::from_i64(23, bits) * y.clone()).sqrt()).exp();
    Ok(T::from_i64(12, bits).sqrt() * dim * e / (y.sqrt() * order))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaLimit {
    pub i: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub value: BigRational,
    pub decimal: String,
}

fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// dim(χ_i) / Σ_j dim(χ_j).
pub fn delta_limit(table: &CharacterTable, i: usize) -> Result<DeltaLimit, DistribError> {
    check_index(table, i)?;
    let total: BigInt = table.dims.iter().sum();
    let value = BigRational::new(table.dim(i).clone(), total);
    let decimal = format_sig(&value, 4);
    Ok(DeltaLimit { i, value, decimal })
}

/// Truncate a rational to `digits` significant figures: fixed notation for
/// magnitudes in [10⁻³, 10⁶), otherwise `d.ddde-k`.
pub fn format_sig(x: &BigRational, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_zero() {
        return "0".into();
    }
    let sign = if x.is_negative() { "-" } else { "" };
    let x = x.abs();
    let ten = BigInt::from(10);
    // e with 10^e ≤ x < 10^(e+1)
    let mut e = x.numer().to_string().len() as i64 - x.denom().to_string().len() as i64;
    let pow = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(ten.pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), ten.pow((-k) as u32))
        }
    };
    while x < pow(e) {
        e -= 1;
    }
    while x >= pow(e + 1) {
        e += 1;
    }
    let shift = digits as i64 - 1 - e;
    let scaled = &x * pow(shift);
    let s = scaled.floor().to_integer().to_string();
    if (-3..6).contains(&e) {
        if e >= 0 {
            let int_len = (e + 1) as usize;
            if int_len >= s.len() {
                format!("{sign}{s}{}", "0".repeat(int_len - s.len()))
            } else {
                format!("{sign}{}.{}", &s[..int_len], &s[int_len..])
            }
        } else {
            format!("{sign}0.{}{s}", "0".repeat((-e - 1) as usize))
        }
    } else if s.len() == 1 {
        format!("{sign}{s}e{e}")
    } else {
        format!("{sign}{}.{}e{e}", &s[..1], &s[1..])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProportionRow {
    pub n: i64,
    #[serde(serialize_with = "ser_bigint")]
    pub total: BigInt,
    /// m_i / Σ_j m_j, absent when the piece is zero
    #[serde(serialize_with = "ser_opt_ratios")]
    pub deltas: Vec<Option<BigRational>>,
}

fn ser_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_opt_ratios<S: serde::Serializer>(v: &[Option<BigRational>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&r.as_ref().map(|r| r.to_string()))?;
    }
    seq.end()
}

/// Proportions δ(m_i(−m, n)) for selected irreducibles, with the limits as
/// the final row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProportionTable {
    pub m: i64,
    pub indices: Vec<usize>,
    pub rows: Vec<ProportionRow>,
    pub limit: Vec<DeltaLimit>,
}

/// Rendering of 0/0 rows.
pub const UNDEFINED: &str = "—";

pub fn proportion_table(
    table: &CharacterTable,
    m: i64,
    decomps: &[ModuleDecomposition],
    indices: &[usize],
) -> Result<ProportionTable, DistribError> {
    for &i in indices {
        check_index(table, i)?;
    }
    let k = table.dims.len();
    let mut rows = Vec::new();
    for d in decomps {
        if d.multiplicities.len() != k {
            return Err(DistribError::Incomplete(d.n));
        }
        let total = d.total();
        let deltas = indices
            .iter()
            .map(|i| (!total.is_zero()).then(|| BigRational::new(d.multiplicities[i].clone(), total.clone())))
            .collect();
        rows.push(ProportionRow { n: d.n, total, deltas });
    }
    let limit = indices.iter().map(|&i| delta_limit(table, i)).collect::<Result<_, _>>()?;
    Ok(ProportionTable { m, indices: indices.to_vec(), rows, limit })
}

impl ProportionTable {
    pub fn header(&self) -> Vec<String> {
        std::iter::once("n".to_string()).chain(self.indices.iter().map(|i| format!("delta_{i}"))).collect()
    }

    /// Body rows as displayed, the limit row last.
    pub fn cells(&self, digits: usize) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                std::iter::once(r.n.to_string())
                    .chain(r.deltas.iter().map(|d| d.as_ref().map_or(UNDEFINED.to_string(), |d| format_sig(d, digits))))
                    .collect()
            })
            .collect();
        out.push(std::iter::once("inf".to_string()).chain(self.limit.iter().map(|l| format_sig(&l.value, digits))).collect());
        out
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header()).expect("in-memory write");
        for row in self.cells(digits) {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn to_text(&self, digits: usize) -> String {
        let mut rows = vec![self.header()];
        rows.extend(self.cells(digits));
        render_columns(&rows)
    }
}

/// Left-aligned columns separated by two spaces.
pub fn render_columns(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> =
            r.iter().enumerate().map(|(c, s)| format!("{s}{}", " ".repeat(widths[c] - s.chars().count()))).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantumDimension {
    pub i: usize,
    /// (n, m_i(−1, n) / m_1(−1, n)) wherever m_1 > 0
    pub sequence: Vec<(i64, f64)>,
    pub last: f64,
    /// |last − dim χ_i| / dim χ_i
    pub relative_gap: f64,
}

pub fn quantum_dimension(table: &CharacterTable, i: usize, decomps: &[ModuleDecomposition]) -> Result<QuantumDimension, DistribError> {
    check_index(table, i)?;
    let dim = table.dim(i).to_f64().unwrap_or(f64::INFINITY);
    let mut sequence = Vec::new();
    for d in decomps {
        let (Some(mi), Some(m1)) = (d.multiplicities.get(&i), d.multiplicities.get(&1)) else {
            continue;
        };
        if m1.is_positive() {
            let r = BigRational::new(mi.clone(), m1.clone());
            sequence.push((d.n, r.to_f64().unwrap_or(f64::NAN)));
        }
    }
    let last = sequence.last().map_or(f64::NAN, |s| s.1);
    Ok(QuantumDimension { i, sequence, last, relative_gap: (last - dim).abs() / dim })
}
