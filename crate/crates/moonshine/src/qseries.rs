//! Truncated Laurent series in q with exact coefficients.
//!
//! A [`QSeries`] stores coefficients of q^lead, ..., q^(lead+prec−1) and
//! stands for that polynomial plus O(q^(lead+prec)). Binary operations keep
//! only what both operands determine.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("leading coefficient is not a unit")]
    NotInvertible,
    #[error("{0}")]
    Domain(String),
    #[error("need coefficients through q^{needed}, series stops at q^{have}")]
    Precision { needed: i64, have: i64 },
    #[error("coefficient of {at} is not integral: {value}")]
    NonIntegral { at: String, value: String },
}

/// Ring elements usable as coefficients.
pub trait Coeff: Clone + fmt::Debug + PartialEq + num_traits::Num + Neg<Output = Self> + FromPrimitive {}
impl<T: Clone + fmt::Debug + PartialEq + num_traits::Num + Neg<Output = T> + FromPrimitive> Coeff for T {}

#[derive(Clone, Debug, PartialEq)]
pub struct QSeries<T> {
    lead: i64,
    coeffs: Vec<T>,
}

impl<T: Coeff> QSeries<T> {
    pub fn new(lead: i64, coeffs: Vec<T>) -> Self {
        QSeries { lead, coeffs }
    }

    pub fn from_fn(lead: i64, prec: usize, f: impl FnMut(i64) -> T) -> Self {
        QSeries { lead, coeffs: (lead..lead + prec as i64).map(f).collect() }
    }

    /// O(q^order) with nothing known.
    pub fn zero(order: i64) -> Self {
        QSeries { lead: order, coeffs: Vec::new() }
    }

    /// The constant `c` known through q^(prec−1).
    pub fn constant(c: T, prec: usize) -> Self {
        Self::from_fn(0, prec, |n| if n == 0 { c.clone() } else { T::zero() })
    }

    pub fn lead(&self) -> i64 {
        self.lead
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    /// Exponent of the O-term.
    pub fn order(&self) -> i64 {
        self.lead + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of q^n, or `None` past the truncation order.
    pub fn coeff(&self, n: i64) -> Option<T> {
        if n < self.lead {
            Some(T::zero())
        } else {
            self.coeffs.get((n - self.lead) as usize).cloned()
        }
    }

    pub fn try_coeff(&self, n: i64) -> Result<T, SeriesError> {
        self.coeff(n).ok_or(SeriesError::Precision { needed: n, have: self.order() - 1 })
    }

    /// Iterate `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &T)> {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.lead + i as i64, c))
    }

    /// Drop everything from q^order on.
    pub fn truncate(&self, order: i64) -> Self {
        let keep = (order - self.lead).clamp(0, self.coeffs.len() as i64) as usize;
        QSeries { lead: self.lead.min(order), coeffs: self.coeffs[..keep].to_vec() }
    }

    /// Multiply by q^k.
    pub fn shift(&self, k: i64) -> Self {
        QSeries { lead: self.lead + k, coeffs: self.coeffs.clone() }
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> QSeries<U> {
        QSeries { lead: self.lead, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.terms().find(|(_, c)| !c.is_zero()).map(|(n, _)| n)
    }

    /// Remove leading zero coefficients.
    pub fn normalized(&self) -> Self {
        let skip = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        QSeries { lead: self.lead + skip as i64, coeffs: self.coeffs[skip..].to_vec() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        let mut k = k;
        if k == 0 {
            return Self::constant(T::one(), (self.order() - self.lead).max(0) as usize);
        }
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc.expect("k > 0")
    }

    /// Multiplicative inverse; the leading coefficient must be a unit.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let s = self.normalized();
        let a0 = s.coeffs.first().ok_or(SeriesError::NotInvertible)?.clone();
        let inv0 = T::one() / a0.clone();
        if inv0.clone() * a0 != T::one() {
            return Err(SeriesError::NotInvertible);
        }
        let p = s.coeffs.len();
        let mut b: Vec<T> = Vec::with_capacity(p);
        b.push(inv0.clone());
        for n in 1..p {
            let mut acc = T::zero();
            for k in 1..=n {
                acc = acc + s.coeffs[k].clone() * b[n - k].clone();
            }
            b.push(-(acc * inv0.clone()));
        }
        Ok(QSeries { lead: -s.lead, coeffs: b })
    }

    /// q·d/dq.
    pub fn derivative(&self) -> Self {
        QSeries {
            lead: self.lead,
            coeffs: self.terms().map(|(n, c)| c.clone() * T::from_i64(n).expect("exponent fits")).collect(),
        }
    }

    /// Substitute q → q^k.
    pub fn dilate(&self, k: i64) -> Self {
        assert!(k >= 1);
        let order = self.order() * k;
        let lead = self.lead * k;
        let mut coeffs = vec![T::zero(); (order - lead) as usize];
        for (n, c) in self.terms() {
            coeffs[(n * k - lead) as usize] = c.clone();
        }
        QSeries { lead, coeffs }
    }
}

impl QSeries<BigRational> {
    /// exp of a series with lead ≥ 1.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if let Some(v) = self.valuation() {
            if v < 1 {
                return Err(SeriesError::Domain("exp needs a series without constant or polar terms".into()));
            }
        }
        let order = self.order().max(1);
        let g = |k: i64| self.coeff(k).unwrap_or_else(BigRational::zero);
        let mut f: Vec<BigRational> = vec![BigRational::one()];
        for n in 1..order {
            let mut acc = BigRational::zero();
            for k in 1..=n {
                let gk = g(k);
                if !gk.is_zero() {
                    acc += gk * BigRational::from_integer(k.into()) * &f[(n - k) as usize];
                }
            }
            f.push(acc / BigRational::from_integer(n.into()));
        }
        Ok(QSeries { lead: 0, coeffs: f })
    }

    /// log of the unit part q^(−lead)·self, which must start with 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        let s = self.normalized();
        if s.coeffs.first() != Some(&BigRational::one()) {
            return Err(SeriesError::Domain("log needs leading coefficient 1".into()));
        }
        let f = &s.coeffs;
        let p = f.len();
        // n·g_n = n·f_n − Σ_{k=1}^{n−1} k·g_k·f_{n−k}
        let mut g: Vec<BigRational> = vec![BigRational::zero(); p];
        for n in 1..p {
            let mut acc = BigRational::from_integer(BigInt::from(n)) * &f[n];
            for k in 1..n {
                acc -= BigRational::from_integer(BigInt::from(k)) * &g[k] * &f[n - k];
            }
            g[n] = acc / BigRational::from_integer(BigInt::from(n));
        }
        Ok(QSeries { lead: 0, coeffs: g })
    }

    /// Convert back to integers, failing on any fractional coefficient.
    pub fn to_integer(&self) -> Result<QSeries<BigInt>, SeriesError> {
        let coeffs = self
            .terms()
            .map(|(n, c)| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(SeriesError::NonIntegral { at: format!("q^{n}"), value: c.to_string() })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QSeries { lead: self.lead, coeffs })
    }
}

impl QSeries<BigInt> {
    pub fn to_rational(&self) -> QSeries<BigRational> {
        self.map(|c| BigRational::from_integer(c.clone()))
    }
}

fn add_like<T: Coeff>(a: &QSeries<T>, b: &QSeries<T>, negate: bool) -> QSeries<T> {
    let lead = a.lead.min(b.lead);
    let order = a.order().min(b.order());
    let coeffs = (lead..order.max(lead))
        .map(|n| {
            let x = a.coeff(n).expect("below order");
            let y = b.coeff(n).expect("below order");
            if negate {
                x - y
            } else {
                x + y
            }
        })
        .collect();
    QSeries { lead, coeffs }
}

impl<T: Coeff> Add for &QSeries<T> {
    type Output = QSeries<T>;
    fn add(self, rhs: Self) -> QSeries<T> {
        add_like(self, rhs, false)
    }
}

impl<T: Coeff> Sub for &QSeries<T> {
    type Output = QSeries<T>;
    fn sub(self, rhs: Self) -> QSeries<T> {
        add_like(self, rhs, true)
    }
}

impl<T: Coeff> Neg for &QSeries<T> {
    type Output = QSeries<T>;
    fn neg(self) -> QSeries<T> {
        self.map(|c| -c.clone())
    }
}

impl<T: Coeff> Mul for &QSeries<T> {
    type Output = QSeries<T>;
    fn mul(self, rhs: Self) -> QSeries<T> {
        let lead = self.lead + rhs.lead;
        let order = (self.lead + rhs.order()).min(rhs.lead + self.order());
        let len = (order - lead).max(0) as usize;
        let mut coeffs = vec![T::zero(); len];
        for (i, x) in self.coeffs.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] = coeffs[i + j].clone() + x.clone() * y.clone();
            }
        }
        QSeries { lead, coeffs }
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for QSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*q")?,
                _ => write!(f, "{c}*q^{n}")?,
            }
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O(q^{})", self.order())
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    lead: i64,
    coeffs: Vec<String>,
    prec: usize,
}

impl<T: Coeff + fmt::Display> Serialize for QSeries<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SeriesJson { lead: self.lead, coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(), prec: self.prec() }
            .serialize(s)
    }
}

impl<'de, T: Coeff + FromStr> Deserialize<'de> for QSeries<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = SeriesJson::deserialize(d)?;
        if raw.coeffs.len() != raw.prec {
            return Err(D::Error::custom("prec does not match the number of coefficients"));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| s.parse::<T>().map_err(|_| D::Error::custom(format!("bad coefficient {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QSeries { lead: raw.lead, coeffs })
    }
}

/// Integer series, the common case.
pub type ZSeries = QSeries<BigInt>;

fn sigma3(n: u64) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(3);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(3);
            }
        }
        d += 1;
    }
    s
}

/// (q)_∞ = ∏_{n>0}(1 − qⁿ) through q^(prec−1), from the pentagonal numbers.
pub fn eta_pochhammer(prec: usize) -> ZSeries {
    let mut coeffs = vec![BigInt::zero(); prec];
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let e = kk * (3 * kk - 1) / 2;
            if (e as usize) < prec {
                any = true;
                coeffs[e as usize] += if kk.is_even() { 1 } else { -1 };
            }
        }
        if !any && k > 0 {
            break;
        }
        k += 1;
    }
    QSeries::new(0, coeffs)
}

/// Normalized weight-4 Eisenstein series E₄ = 1 + 240 Σ σ₃(n) qⁿ.
pub fn eisenstein_e4(prec: usize) -> ZSeries {
    QSeries::from_fn(0, prec, |n| if n == 0 { BigInt::one() } else { sigma3(n as u64) * 240 })
}

/// J = E₄³/Δ − 744 = q⁻¹ + Σ c(n)qⁿ with `prec` coefficients from q⁻¹.
pub fn j_series(prec: usize) -> ZSeries {
    assert!(prec >= 1);
    let e4 = eisenstein_e4(prec);
    let e4_cubed = &(&e4 * &e4) * &e4;
    let eta24 = eta_pochhammer(prec).pow(24);
    let quotient = &e4_cubed * &eta24.inverse().expect("(q)_∞ is a unit");
    let mut j = quotient.shift(-1);
    if prec >= 2 {
        j.coeffs[1] -= 744;
    }
    j
}

/// c(n) read from a J expansion; c(n) = 0 for n < −1.
fn jc(j: &ZSeries, n: i64) -> Result<BigInt, SeriesError> {
    j.try_coeff(n)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("c(4n+2) recursion fails at n = {n}: residual {residual}")]
pub struct MahlerViolation {
    pub n: i64,
    pub residual: BigInt,
}

/// Check c(4n+2) = c(2n+2) + Σ_{k=1}^{n} c(k)·c(2n−k+1) for every n the
/// series covers; returns the n checked.
pub fn mahler_check(series: &ZSeries) -> Result<Vec<i64>, MahlerViolation> {
    let top = series.order() - 1;
    let mut checked = Vec::new();
    let mut n = 0;
    while 4 * n + 2 <= top {
        let c = |k: i64| series.coeff(k).expect("within order");
        let mut rhs = c(2 * n + 2);
        for k in 1..=n {
            rhs += c(k) * c(2 * n - k + 1);
        }
        let residual = c(4 * n + 2) - rhs;
        if !residual.is_zero() {
            return Err(MahlerViolation { n, residual });
        }
        checked.push(n);
        n += 1;
    }
    Ok(checked)
}

/// J^(−m) = q^(−m) + Σ_{n>0} c(−m,n)qⁿ, with `prec` coefficients from q^(−m)
/// and c(−m,n) = Σ_{k|(m,n)} (m/k)·c(mn/k²).
pub fn hecke_tower_dims(m: u64, prec: usize) -> ZSeries {
    assert!(m >= 1);
    let m = m as i64;
    let top = -m + prec as i64 - 1;
    let j = j_series((m * top.max(0) + 2) as usize);
    QSeries::from_fn(-m, prec, |n| {
        if n == -m {
            BigInt::one()
        } else if n <= 0 {
            BigInt::zero()
        } else {
            let g = m.gcd(&n);
            (1..=g)
                .filter(|k| g % k == 0)
                .map(|k| jc(&j, m * n / (k * k)).expect("J long enough") * (m / k))
                .sum()
        }
    })
}

/// The series q^(−m) + O(q) that is a monic degree-m polynomial in `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct FaberTower<T> {
    pub series: QSeries<T>,
    /// poly[j] is the coefficient of X^j; poly[m] = 1.
    pub poly: Vec<T>,
}

/// Faber polynomial image of `base = q⁻¹ + O(1)` in degree `m`.
pub fn faber_tower<T: Coeff>(base: &QSeries<T>, m: u32) -> Result<FaberTower<T>, SeriesError> {
    let base = base.normalized();
    if base.lead() != -1 || base.coeff(-1) != Some(T::one()) {
        return Err(SeriesError::Domain("base must be q^-1 + O(1)".into()));
    }
    if base.order() < 1 {
        return Err(SeriesError::Precision { needed: 0, have: base.order() - 1 });
    }
    let powers: Vec<QSeries<T>> = (0..=m).map(|k| base.pow(k)).collect();
    let mut series = powers[m as usize].clone();
    let mut poly = vec![T::zero(); m as usize + 1];
    poly[m as usize] = T::one();
    for j in (0..m).rev() {
        let c = series.try_coeff(-(j as i64))?;
        if !c.is_zero() {
            series = &series - &powers[j as usize].scale(&c);
            poly[j as usize] = -c;
        }
    }
    let order = series.order();
    if order < 1 {
        return Err(SeriesError::Precision { needed: 0, have: order - 1 });
    }
    Ok(FaberTower { series: series.truncate(order), poly })
}

/// U_g = (q)_∞·T_g + 1.
pub fn ug_from_tg(tg: &ZSeries) -> ZSeries {
    let poch = eta_pochhammer((tg.order() + 1).max(1) as usize);
    let prod = &poch * tg;
    &prod + &QSeries::constant(BigInt::one(), (prod.order().max(1)) as usize)
}

/// Truncated series in two variables p and q.
///
/// `coeffs[i][j]` is the coefficient of p^(lead_p+i) q^(lead_q+j).
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<T> {
    pub lead_p: i64,
    pub lead_q: i64,
    pub coeffs: Vec<Vec<T>>,
}

impl<T: Coeff> BiSeries<T> {
    pub fn zero(lead_p: i64, lead_q: i64, prec_p: usize, prec_q: usize) -> Self {
        BiSeries { lead_p, lead_q, coeffs: vec![vec![T::zero(); prec_q]; prec_p] }
    }

    pub fn one(prec_p: usize, prec_q: usize) -> Self {
        let mut s = Self::zero(0, 0, prec_p, prec_q);
        s.coeffs[0][0] = T::one();
        s
    }

    pub fn prec_p(&self) -> usize {
        self.coeffs.len()
    }

    pub fn prec_q(&self) -> usize {
        self.coeffs.first().map_or(0, Vec::len)
    }

    pub fn get(&self, m: i64, n: i64) -> Option<&T> {
        let i = usize::try_from(m - self.lead_p).ok()?;
        let j = usize::try_from(n - self.lead_q).ok()?;
        self.coeffs.get(i)?.get(j)
    }

    /// Product truncated to the window both factors determine.
    pub fn mul(&self, o: &Self) -> Self {
        let lead_p = self.lead_p + o.lead_p;
        let lead_q = self.lead_q + o.lead_q;
        let pp = (self.prec_p() as i64 + self.lead_p + o.lead_p).min(o.prec_p() as i64 + o.lead_p + self.lead_p) - lead_p;
        let pq = (self.prec_q() as i64 + self.lead_q + o.lead_q).min(o.prec_q() as i64 + o.lead_q + self.lead_q) - lead_q;
        let (pp, pq) = (pp.min(self.prec_p() as i64).min(o.prec_p() as i64) as usize, pq.min(self.prec_q() as i64).min(o.prec_q() as i64) as usize);
        let mut out = Self::zero(lead_p, lead_q, pp, pq);
        for (i1, row1) in self.coeffs.iter().enumerate().take(pp) {
            for (j1, x) in row1.iter().enumerate().take(pq) {
                if x.is_zero() {
                    continue;
                }
                for (i2, row2) in o.coeffs.iter().enumerate().take(pp - i1) {
                    for (j2, y) in row2.iter().enumerate().take(pq - j1) {
                        if !y.is_zero() {
                            out.coeffs[i1 + i2][j1 + j2] = out.coeffs[i1 + i2][j1 + j2].clone() + x.clone() * y.clone();
                        }
                    }
                }
            }
        }
        out
    }

    /// Maximum |coefficient| over p^m q^n with m, n ≥ 1 inside the window.
    pub fn max_mixed(&self, max_m: i64, max_n: i64) -> T
    where
        T: Signed + PartialOrd,
    {
        let mut best = T::zero();
        for m in 1..=max_m {
            for n in 1..=max_n {
                if let Some(c) = self.get(m, n) {
                    if c.abs() > best {
                        best = c.abs();
                    }
                }
            }
        }
        best
    }
}

fn binomial(n: &BigInt, k: u64) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * (n - BigInt::from(i)) / BigInt::from(i + 1);
    }
    r
}

/// ∏_{m,n≥1} (1 − p^m q^n)^{c(mn)} for 0 ≤ m ≤ max_p, 0 ≤ n ≤ max_q.
pub fn denominator_product(max_p: usize, max_q: usize) -> BiSeries<BigInt> {
    let j = j_series(max_p * max_q + 2);
    let mut f = BiSeries::<BigInt>::one(max_p + 1, max_q + 1);
    for m in 1..=max_p {
        for n in 1..=max_q {
            let expo = jc(&j, (m * n) as i64).expect("J long enough");
            let tmax = (max_p / m).min(max_q / n) as u64;
            let factor: Vec<BigInt> = (0..=tmax)
                .map(|t| if t.is_even() { binomial(&expo, t) } else { -binomial(&expo, t) })
                .collect();
            let mut next = BiSeries::<BigInt>::zero(0, 0, max_p + 1, max_q + 1);
            for a in 0..=max_p {
                for b in 0..=max_q {
                    let mut acc = BigInt::zero();
                    for (t, ft) in factor.iter().enumerate() {
                        let (dm, dn) = (t * m, t * n);
                        if dm > a || dn > b {
                            break;
                        }
                        acc += ft * &f.coeffs[a - dm][b - dn];
                    }
                    next.coeffs[a][b] = acc;
                }
            }
            f = next;
        }
    }
    f
}

/// (p⁻¹ − q⁻¹)·F on the window p^m q^n, 0 ≤ m < prec_p, 0 ≤ n < prec_q.
fn polar_prefactor<T: Coeff>(f: &BiSeries<T>, prec_p: usize, prec_q: usize) -> BiSeries<T> {
    let mut out = BiSeries::zero(0, 0, prec_p, prec_q);
    for m in 0..prec_p {
        for n in 0..prec_q {
            out.coeffs[m][n] = f.coeffs[m + 1][n].clone() - f.coeffs[m][n + 1].clone();
        }
    }
    out
}

/// Largest |coefficient| of p^m q^n (1 ≤ m ≤ prec_p, 1 ≤ n ≤ prec_q) in
/// p⁻¹∏_{m>0,n∈ℤ}(1 − p^m q^n)^{c(mn)} − (J(σ) − J(τ)). Zero when the
/// identity holds.
pub fn denominator_identity_residual(prec_p: usize, prec_q: usize) -> BigInt {
    let f = denominator_product(prec_p + 1, prec_q + 1);
    let lhs = polar_prefactor(&f, prec_p + 1, prec_q + 1);
    lhs.max_mixed(prec_p as i64, prec_q as i64)
}

/// The full identity checked on the window including the p^m q⁰ and p⁰ qⁿ
/// edges, where the right side contributes c(m) and −c(n).
pub fn denominator_identity_edges(prec_p: usize, prec_q: usize) -> bool {
    let f = denominator_product(prec_p + 1, prec_q + 1);
    let lhs = polar_prefactor(&f, prec_p + 1, prec_q + 1);
    let j = j_series(prec_p.max(prec_q) + 2);
    (1..=prec_p).all(|m| lhs.coeffs[m][0] == jc(&j, m as i64).unwrap())
        && (1..=prec_q).all(|n| lhs.coeffs[0][n] == -jc(&j, n as i64).unwrap())
}

/// Residual of the twisted denominator identity for one class g.
///
/// `traces[k]` is T_{g^k}. Evaluates
/// p⁻¹·exp(−Σ_{k>0}Σ_{m>0,n} (1/k)·tr(g^k|V_{mn})·p^{mk}q^{nk}) − (T_g(σ) − T_g(τ))
/// on p^m q^n with m, n ≥ 1 (where the right side vanishes) and returns the
/// largest |coefficient|. The exponential must also come out integral.
pub fn equivariant_denominator_check(
    traces: &BTreeMap<u64, ZSeries>,
    prec_p: usize,
    prec_q: usize,
) -> Result<BigInt, SeriesError> {
    let (mp, mq) = (prec_p + 1, prec_q + 1);
    let mut x = BiSeries::<BigRational>::zero(0, 0, mp + 1, mq + 1);
    for k in 1..=mp.max(mq) {
        for m in 1..=mp / k {
            for n in 1..=mq / k {
                let t = traces.get(&(k as u64)).ok_or_else(|| SeriesError::Domain(format!("missing trace of g^{k}")))?;
                let c = t.try_coeff((m * n) as i64)?;
                if c.is_zero() {
                    continue;
                }
                let term = BigRational::new(-c, BigInt::from(k));
                x.coeffs[m * k][n * k] += term;
            }
        }
    }
    // exp(X); X has p-degree ≥ 1 so the sum stops at X^(mp)
    let mut total = BiSeries::<BigRational>::one(mp + 1, mq + 1);
    let mut power = BiSeries::<BigRational>::one(mp + 1, mq + 1);
    let mut fact = BigInt::one();
    for j in 1..=mp {
        power = power.mul(&x);
        fact *= j;
        for (row_t, row_p) in total.coeffs.iter_mut().zip(&power.coeffs) {
            for (t, p) in row_t.iter_mut().zip(row_p) {
                if !p.is_zero() {
                    *t += p / BigRational::from_integer(fact.clone());
                }
            }
        }
    }
    let mut f = BiSeries::<BigInt>::zero(0, 0, mp + 1, mq + 1);
    for (m, row) in total.coeffs.iter().enumerate() {
        for (n, c) in row.iter().enumerate() {
            if !c.is_integer() {
                return Err(SeriesError::NonIntegral { at: format!("p^{m} q^{n}"), value: c.to_string() });
            }
            f.coeffs[m][n] = c.to_integer();
        }
    }
    let lhs = polar_prefactor(&f, mp, mq);
    Ok(lhs.max_mixed(prec_p as i64, prec_q as i64))
}
