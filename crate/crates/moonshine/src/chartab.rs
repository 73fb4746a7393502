//! Monster character table, multiplicities and Adams operations.
//!
//! Character values are quadratic irrationalities (a + b√d)/2 and every sum
//! is exact. Weighted sums run over conjugacy classes with class size
//! |M|/|C(g)|.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qseries::{ug_from_tg, ZSeries};

#[derive(Debug, Error)]
pub enum ChartabError {
    #[error("cannot read character table: {0}")]
    Io(#[from] std::io::Error),
    #[error("character table schema: {0}")]
    Schema(String),
    #[error("group order {0} is not the Monster's")]
    GroupOrder(String),
    #[error("{kind} orthogonality fails, worst residual {residual}")]
    Orthogonality { kind: &'static str, residual: String },
    #[error("no trace series for class {0}")]
    MissingClass(String),
    #[error("character χ{0} is not in this table")]
    MissingCharacter(usize),
    #[error("multiplicity of χ{i} at n = {n} is not an integer: {value}")]
    NonIntegral { i: usize, n: i64, value: String },
    #[error("multiplicity of χ{i} at n = {n} is negative: {value}")]
    Negative { i: usize, n: i64, value: BigInt },
    #[error("trace series for {class} stops before q^{n}")]
    Precision { class: String, n: i64 },
}

/// |M| = 2^46·3^20·5^9·7^6·11^2·13^3·17·19·23·29·31·41·47·59·71.
pub fn monster_order() -> BigInt {
    let f: [(u32, u32); 15] =
        [(2, 46), (3, 20), (5, 9), (7, 6), (11, 2), (13, 3), (17, 1), (19, 1), (23, 1), (29, 1), (31, 1), (41, 1), (47, 1), (59, 1), (71, 1)];
    f.iter().map(|&(p, e)| BigInt::from(p).pow(e)).product()
}

/// (a + b√d)/2 with squarefree d; d = 1 and b = 0 for rational values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterValue {
    #[serde(with = "decimal")]
    pub a: BigInt,
    #[serde(with = "decimal")]
    pub b: BigInt,
    pub d: i64,
}

mod decimal {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| serde::de::Error::custom(format!("not a decimal integer: {s:?}")))
    }
}

impl CharacterValue {
    pub fn integer(n: impl Into<BigInt>) -> Self {
        CharacterValue { a: n.into() * 2, b: BigInt::zero(), d: 1 }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero() || self.d == 1
    }

    /// Complex conjugate: only imaginary surds change sign.
    pub fn conj(&self) -> Self {
        if self.d < 0 {
            CharacterValue { a: self.a.clone(), b: -&self.b, d: self.d }
        } else {
            self.clone()
        }
    }

    /// The value as an integer, if it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        if !self.is_rational() {
            return None;
        }
        let total = if self.d == 1 { &self.a + &self.b } else { self.a.clone() };
        total.is_even().then(|| total / 2)
    }

    fn valid(&self) -> bool {
        // integrality of (a + b√d)/2 as an algebraic integer
        if self.d == 1 {
            return (&self.a + &self.b).is_even();
        }
        if self.d.rem_euclid(4) == 1 {
            (&self.a - &self.b).is_even()
        } else {
            self.a.is_even() && self.b.is_even()
        }
    }
}

impl fmt::Display for CharacterValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_integer() {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "({} + {}·√{})/2", self.a, self.b, self.d),
        }
    }
}

/// Exact element of ⊕_d Q·√d, kept with a common denominator of 4.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct SurdSum {
    /// d → numerator of the √d coefficient, over 4
    parts: BTreeMap<i64, BigInt>,
}

impl SurdSum {
    /// Add w·x·y for character values x, y.
    fn add_product(&mut self, w: &BigInt, x: &CharacterValue, y: &CharacterValue) {
        // (a1 + b1√d1)(a2 + b2√d2)
        let terms = [
            (1, &x.a * &y.a),
            (x.d, &x.b * &y.a),
            (y.d, &x.a * &y.b),
        ];
        for (d, v) in terms {
            if !v.is_zero() {
                *self.parts.entry(d).or_default() += w * v;
            }
        }
        if !x.b.is_zero() && !y.b.is_zero() {
            let bb = &x.b * &y.b;
            let (d, scale) = surd_product(x.d, y.d);
            *self.parts.entry(d).or_default() += w * bb * scale;
        }
    }

    /// Add 2·w·x (the scale matches add_product with an integer factor).
    fn add_scaled(&mut self, w: &BigInt, x: &CharacterValue) {
        let w2 = w * 2;
        *self.parts.entry(1).or_default() += &w2 * &x.a;
        if !x.b.is_zero() {
            *self.parts.entry(x.d).or_default() += &w2 * &x.b;
        }
    }

    /// The rational part over 4, failing if any surd survives.
    fn rational_over_4(&self) -> Result<BigInt, String> {
        for (d, v) in &self.parts {
            if *d != 1 && !v.is_zero() {
                return Err(format!("{v}·√{d}/4"));
            }
        }
        Ok(self.parts.get(&1).cloned().unwrap_or_default())
    }

    fn residual(&self, target_over_4: &BigInt) -> BigInt {
        let mut worst = BigInt::zero();
        for (d, v) in &self.parts {
            let r = if *d == 1 { (v - target_over_4).abs() } else { v.abs() };
            worst = worst.max(r);
        }
        if !self.parts.contains_key(&1) {
            worst = worst.max(target_over_4.abs());
        }
        worst
    }
}

/// √d1·√d2 = scale·√d for squarefree d1, d2, with the principal branch for
/// negative radicands.
fn surd_product(d1: i64, d2: i64) -> (i64, BigInt) {
    let sign = if d1 < 0 && d2 < 0 { -1 } else { 1 };
    let (u1, u2) = (d1.unsigned_abs(), d2.unsigned_abs());
    let g = u1.gcd(&u2);
    let rest = (u1 / g) * (u2 / g);
    let d = if (d1 < 0) != (d2 < 0) { -(rest as i64) } else { rest as i64 };
    (d, BigInt::from(sign) * BigInt::from(g))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassInfo {
    pub name: String,
    #[serde(with = "decimal")]
    pub centralizer_order: BigInt,
    pub element_order: u64,
    pub power_map: BTreeMap<u64, String>,
    #[serde(default)]
    pub symbol: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CharacterRow {
    index: usize,
    values: Vec<CharacterValue>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TableFile {
    group_order: String,
    classes: Vec<ClassInfo>,
    characters: Vec<CharacterRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dims: Option<Vec<String>>,
}

/// The character table, possibly with only some rows present.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub group_order: BigInt,
    pub classes: Vec<ClassInfo>,
    /// 1-based index → values in class order
    rows: BTreeMap<usize, Vec<CharacterValue>>,
    pub dims: Vec<BigInt>,
    class_sizes: Vec<BigInt>,
    index: BTreeMap<String, usize>,
}

pub const BUNDLED_PARTIAL_TABLE: &str = include_str!("../data/monster_partial.json");

pub const DATA_DIR_ENV: &str = "MOONSHINE_DATA_DIR";

impl CharacterTable {
    pub fn from_json(text: &str) -> Result<Self, ChartabError> {
        let file: TableFile = serde_json::from_str(text).map_err(|e| ChartabError::Schema(e.to_string()))?;
        Self::from_file(file)
    }

    fn from_file(file: TableFile) -> Result<Self, ChartabError> {
        let group_order: BigInt =
            file.group_order.parse().map_err(|_| ChartabError::Schema("group_order is not a decimal integer".into()))?;
        if group_order != monster_order() {
            return Err(ChartabError::GroupOrder(file.group_order));
        }
        let k = file.classes.len();
        if k != 194 {
            return Err(ChartabError::Schema(format!("expected 194 classes, found {k}")));
        }
        let index: BTreeMap<String, usize> = file.classes.iter().enumerate().map(|(i, c)| (c.name.clone(), i)).collect();
        if index.len() != k {
            return Err(ChartabError::Schema("duplicate class names".into()));
        }
        let mut rows = BTreeMap::new();
        for row in file.characters {
            if row.index == 0 || row.index > k {
                return Err(ChartabError::Schema(format!("character index {} out of range", row.index)));
            }
            if row.values.len() != k {
                return Err(ChartabError::Schema(format!("χ{} has {} values", row.index, row.values.len())));
            }
            if let Some(v) = row.values.iter().find(|v| !v.valid()) {
                return Err(ChartabError::Schema(format!("χ{} has a non-integral value {v:?}", row.index)));
            }
            if rows.insert(row.index, row.values).is_some() {
                return Err(ChartabError::Schema(format!("χ{} appears twice", row.index)));
            }
        }
        let identity = index.get("1A").copied().ok_or_else(|| ChartabError::Schema("no class 1A".into()))?;
        let dims: Vec<BigInt> = match file.dims {
            Some(d) => d
                .iter()
                .map(|s| s.parse().map_err(|_| ChartabError::Schema(format!("bad dimension {s:?}"))))
                .collect::<Result<_, _>>()?,
            None => (1..=k)
                .map(|i| {
                    rows.get(&i)
                        .and_then(|r: &Vec<CharacterValue>| r[identity].as_integer())
                        .ok_or_else(|| ChartabError::Schema(format!("no dimension for χ{i}")))
                })
                .collect::<Result<_, _>>()?,
        };
        let class_sizes = file.classes.iter().map(|c| &group_order / &c.centralizer_order).collect();
        let table = CharacterTable { group_order, classes: file.classes, rows, dims, class_sizes, index };
        table.validate()?;
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self, ChartabError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The bundled partial table, or `monster_partial.json` under
    /// `$MOONSHINE_DATA_DIR` when that is set.
    pub fn bundled() -> Result<Self, ChartabError> {
        match std::env::var_os(DATA_DIR_ENV) {
            Some(dir) => Self::load(&Path::new(&dir).join("monster_partial.json")),
            None => Self::from_json(BUNDLED_PARTIAL_TABLE),
        }
    }

    pub fn to_json(&self) -> String {
        let file = TableFile {
            group_order: self.group_order.to_string(),
            classes: self.classes.clone(),
            characters: self.rows.iter().map(|(&index, values)| CharacterRow { index, values: values.clone() }).collect(),
            dims: Some(self.dims.iter().map(|d| d.to_string()).collect()),
        };
        serde_json::to_string(&file).expect("serializable")
    }

    pub fn is_complete(&self) -> bool {
        self.rows.len() == self.classes.len()
    }

    pub fn row_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn row(&self, i: usize) -> Option<&[CharacterValue]> {
        self.rows.get(&i).map(Vec::as_slice)
    }

    pub fn class(&self, name: &str) -> Option<&ClassInfo> {
        self.index.get(name).map(|&i| &self.classes[i])
    }

    pub fn class_size(&self, class: usize) -> &BigInt {
        &self.class_sizes[class]
    }

    pub fn dim(&self, i: usize) -> &BigInt {
        &self.dims[i - 1]
    }

    /// Class of g^k.
    pub fn power(&self, class: &str, k: u64) -> Option<&str> {
        let c = self.class(class)?;
        let r = k % c.element_order;
        let r = if r == 0 { c.element_order } else { r };
        c.power_map.get(&r).map(String::as_str)
    }

    fn validate(&self) -> Result<(), ChartabError> {
        let m = &self.group_order;
        let mut total = BigInt::zero();
        for (c, size) in self.classes.iter().zip(&self.class_sizes) {
            if !(m % &c.centralizer_order).is_zero() {
                return Err(ChartabError::Schema(format!("|C({})| does not divide |M|", c.name)));
            }
            if c.power_map.get(&1) != Some(&c.name) {
                return Err(ChartabError::Schema(format!("power map of {} does not fix it at k = 1", c.name)));
            }
            for (&k, img) in &c.power_map {
                let target = self.class(img).ok_or_else(|| ChartabError::Schema(format!("unknown class {img}")))?;
                if target.element_order != c.element_order / c.element_order.gcd(&k) {
                    return Err(ChartabError::Schema(format!("{}^{k} = {img} has the wrong order", c.name)));
                }
            }
            total += size;
        }
        if &total != m {
            return Err(ChartabError::Schema("class sizes do not add up to |M|".into()));
        }
        if self.dims.len() != self.classes.len() || self.dims[0] != BigInt::one() || self.dims.windows(2).any(|w| w[0] > w[1]) {
            return Err(ChartabError::Schema("dimensions must start at 1 and be ascending".into()));
        }
        let sum_sq: BigInt = self.dims.iter().map(|d| d * d).sum();
        if &sum_sq != m {
            return Err(ChartabError::Orthogonality { kind: "dimension", residual: (sum_sq - m).to_string() });
        }
        let id = self.index["1A"];
        for (&i, row) in &self.rows {
            if row[id].as_integer().as_ref() != Some(&self.dims[i - 1]) {
                return Err(ChartabError::Schema(format!("χ{i}(1A) differs from its dimension")));
            }
        }
        self.check_rows()?;
        if self.is_complete() {
            self.check_columns()?;
        }
        Ok(())
    }

    /// Σ_g |g^M|·χ_i(g)·χ̄_j(g) = |M|·δ_ij over the rows present.
    fn check_rows(&self) -> Result<(), ChartabError> {
        let keys: Vec<usize> = self.rows.keys().copied().collect();
        let mut worst = BigInt::zero();
        let target: BigInt = &self.group_order * 4;
        for (p, &i) in keys.iter().enumerate() {
            for &j in &keys[p..] {
                let mut s = SurdSum::default();
                let (ri, rj) = (&self.rows[&i], &self.rows[&j]);
                for c in 0..self.classes.len() {
                    s.add_product(&self.class_sizes[c], &ri[c], &rj[c].conj());
                }
                let want = if i == j { target.clone() } else { BigInt::zero() };
                worst = worst.max(s.residual(&want));
            }
        }
        if worst.is_zero() {
            Ok(())
        } else {
            Err(ChartabError::Orthogonality { kind: "row", residual: format!("{worst}/4") })
        }
    }

    /// Σ_i χ̄_i(g)·χ_i(h) = |C(g)|·δ_gh, for complete tables.
    fn check_columns(&self) -> Result<(), ChartabError> {
        let k = self.classes.len();
        let rows: Vec<&Vec<CharacterValue>> = self.rows.values().collect();
        let one = BigInt::one();
        let mut worst = BigInt::zero();
        for g in 0..k {
            let conj: Vec<CharacterValue> = rows.iter().map(|r| r[g].conj()).collect();
            for h in g..k {
                let mut s = SurdSum::default();
                for (r, cg) in rows.iter().zip(&conj) {
                    s.add_product(&one, cg, &r[h]);
                }
                let want = if g == h { &self.classes[g].centralizer_order * 4 } else { BigInt::zero() };
                worst = worst.max(s.residual(&want));
            }
        }
        if worst.is_zero() {
            Ok(())
        } else {
            Err(ChartabError::Orthogonality { kind: "column", residual: format!("{worst}/4") })
        }
    }

    /// ⟨χ_i, f⟩ = (1/|M|)·Σ_g |g^M|·χ̄_i(g)·f(g) for an integer class function f.
    pub fn inner_product(&self, i: usize, f: &[BigInt], n: i64) -> Result<BigInt, ChartabError> {
        let row = self.rows.get(&i).ok_or(ChartabError::MissingCharacter(i))?;
        let mut s = SurdSum::default();
        for ((size, v), fv) in self.class_sizes.iter().zip(row).zip(f) {
            if !fv.is_zero() {
                s.add_scaled(&(size * fv), &v.conj());
            }
        }
        let num = s.rational_over_4().map_err(|value| ChartabError::NonIntegral { i, n, value })?;
        let den: BigInt = &self.group_order * 4;
        if !(&num % &den).is_zero() {
            return Err(ChartabError::NonIntegral { i, n, value: format!("{num}/{den}") });
        }
        Ok(num / den)
    }
}

/// Multiplicities of the irreducibles in one graded piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleDecomposition {
    pub m: i64,
    pub n: i64,
    /// graded dimension the multiplicities must account for
    pub dimension: BigInt,
    /// χ index → multiplicity, for every row the table has
    pub multiplicities: BTreeMap<usize, BigInt>,
}

impl ModuleDecomposition {
    pub fn total(&self) -> BigInt {
        self.multiplicities.values().sum()
    }
}

fn class_coefficients(table: &CharacterTable, traces: &BTreeMap<String, ZSeries>, n: i64) -> Result<Vec<BigInt>, ChartabError> {
    table
        .classes
        .iter()
        .map(|c| {
            let s = traces.get(&c.name).ok_or_else(|| ChartabError::MissingClass(c.name.clone()))?;
            s.coeff(n).ok_or_else(|| ChartabError::Precision { class: c.name.clone(), n })
        })
        .collect()
}

/// Decompose the degree-n piece of the module whose class traces are `traces`.
pub fn decompose(table: &CharacterTable, m: i64, n: i64, traces: &BTreeMap<String, ZSeries>) -> Result<ModuleDecomposition, ChartabError> {
    let f = class_coefficients(table, traces, n)?;
    let mut multiplicities = BTreeMap::new();
    for i in table.row_indices() {
        multiplicities.insert(i, table.inner_product(i, &f, n)?);
    }
    Ok(ModuleDecomposition { m, n, dimension: f[table.index["1A"]].clone(), multiplicities })
}

/// Decompositions for every degree from the lead of the identity series to `n_max`.
pub fn decompose_series(
    table: &CharacterTable,
    m: i64,
    traces: &BTreeMap<String, ZSeries>,
    n_max: i64,
) -> Result<Vec<ModuleDecomposition>, ChartabError> {
    let lead = traces.get("1A").ok_or_else(|| ChartabError::MissingClass("1A".into()))?.lead();
    (lead..=n_max).map(|n| decompose(table, m, n, traces)).collect()
}

/// m_i(−m, n) for n from −m through `n_max`, each checked nonnegative.
pub fn multiplicity_series(
    table: &CharacterTable,
    i: usize,
    m: i64,
    traces: &BTreeMap<String, ZSeries>,
    n_max: i64,
) -> Result<Vec<(i64, BigInt)>, ChartabError> {
    let mut out = Vec::new();
    for n in -m..=n_max {
        let f = class_coefficients(table, traces, n)?;
        let v = table.inner_product(i, &f, n)?;
        if v.is_negative() {
            return Err(ChartabError::Negative { i, n, value: v });
        }
        out.push((n, v));
    }
    Ok(out)
}

/// tr(g | V^(−m)_n) = Σ_{k|(m,n)} (m/k)·tr(g^k | V_{mn/k²}); δ_{−m,n} for n ≤ 0.
pub fn adams_tower_trace(
    table: &CharacterTable,
    class: &str,
    m: u64,
    n: i64,
    base_traces: &BTreeMap<String, ZSeries>,
) -> Result<BigInt, ChartabError> {
    if n <= 0 {
        return Ok(if n == -(m as i64) { BigInt::one() } else { BigInt::zero() });
    }
    let g = m.gcd(&(n as u64));
    let mut total = BigInt::zero();
    for k in (1..=g).filter(|k| g % k == 0) {
        let img = table.power(class, k).ok_or_else(|| ChartabError::MissingClass(format!("{class}^{k}")))?;
        let s = base_traces.get(img).ok_or_else(|| ChartabError::MissingClass(img.to_string()))?;
        let idx = (m as i64) * n / (k * k) as i64;
        let c = s.coeff(idx).ok_or_else(|| ChartabError::Precision { class: img.to_string(), n: idx })?;
        total += c * (m / k);
    }
    Ok(total)
}

/// n_i(n), the multiplicity of χ_i in the Virasoro highest-weight space W_n,
/// for n from −1 to `n_max`.
pub fn highest_weight_multiplicities(
    table: &CharacterTable,
    i: usize,
    traces: &BTreeMap<String, ZSeries>,
    n_max: i64,
) -> Result<Vec<(i64, BigInt)>, ChartabError> {
    let u: BTreeMap<String, ZSeries> = traces.iter().map(|(k, t)| (k.clone(), ug_from_tg(t))).collect();
    let mut out = Vec::new();
    for n in -1..=n_max {
        let f = class_coefficients(table, &u, n)?;
        let v = table.inner_product(i, &f, n)?;
        if v.is_negative() {
            return Err(ChartabError::Negative { i, n, value: v });
        }
        out.push((n, v));
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check multiplicities are nonnegative and account for the graded dimension.
///
/// With a partial table the dimension check becomes Σ m_i·dim χ_i ≤ dimension.
pub fn nonnegativity_audit(table: &CharacterTable, decomps: &[ModuleDecomposition]) -> AuditReport {
    let mut report = AuditReport::default();
    for dec in decomps {
        report.checked += 1;
        for (i, v) in &dec.multiplicities {
            if v.is_negative() {
                report.violations.push(format!("m_{i}(-{}, {}) = {v}", dec.m, dec.n));
            }
        }
        let covered: BigInt = dec.multiplicities.iter().map(|(i, v)| v * table.dim(*i)).sum();
        let ok = if table.is_complete() { covered == dec.dimension } else { covered <= dec.dimension };
        if !ok {
            report.violations.push(format!("(m, n) = ({}, {}): Σ m_i·dim = {covered}, dimension {}", dec.m, dec.n, dec.dimension));
        }
    }
    report
}

/// Expand one series per distinct symbol to every class sharing it.
pub fn traces_by_class(table: &CharacterTable, by_symbol: &BTreeMap<String, ZSeries>) -> Result<BTreeMap<String, ZSeries>, ChartabError> {
    table
        .classes
        .iter()
        .map(|c| {
            by_symbol
                .get(&c.symbol)
                .map(|s| (c.name.clone(), s.clone()))
                .ok_or_else(|| ChartabError::MissingClass(c.name.clone()))
        })
        .collect()
}
