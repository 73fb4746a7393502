//! Rademacher sums for the coefficients of T_g^(−m) and Û_g.
//!
//! Every coefficient is a sum over cusps ρ where the form has a pole and
//! over moduli c of a Kloosterman sum times an I-Bessel value. The small-c
//! terms dominate and are summed at high precision; once a term's size
//! bound drops below 2^10 it is summed in `f64`, with an FFT over the
//! residue d when many n are wanted at once.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::modgroup::{pole_cusps, GroupSymbol, IntMatrix, RootOfUnity, Q};
use crate::qseries::{QSeries, ZSeries};
use crate::real::{BigReal, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RademacherError {
    #[error("invalid precision: {0}")]
    Config(String),
    #[error("unsupported Bessel order {0}")]
    BesselOrder(Q),
    #[error("Bessel argument must be positive")]
    BesselDomain,
    #[error("rounding certificate fails at n = {n}: distance {distance:.4} to the nearest integer")]
    Certificate { n: i64, distance: f64 },
    #[error("imaginary part {im:e} at n = {n} exceeds the diagnostic bound")]
    Imaginary { n: i64, im: f64 },
    #[error("{0}")]
    Domain(String),
}

/// Working precision and truncation of the c-sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionConfig {
    pub working_bits: usize,
    pub c_max: u64,
}

impl PrecisionConfig {
    pub fn new(working_bits: usize, c_max: u64) -> Result<Self, RademacherError> {
        if working_bits < 64 {
            return Err(RademacherError::Config(format!("working_bits = {working_bits} < 64")));
        }
        if c_max < 1 {
            return Err(RademacherError::Config("c_max must be at least 1".into()));
        }
        Ok(PrecisionConfig { working_bits, c_max })
    }

    pub fn with_c_max(self, c_max: u64) -> Self {
        PrecisionConfig { c_max, ..self }
    }
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig { working_bits: 256, c_max: 200 }
    }
}

/// A truncated Rademacher sum.
#[derive(Clone, Debug)]
pub struct CoefficientEstimate<T> {
    pub value: Complex<T>,
    pub c_max_used: u64,
    /// |sum of the contributions from the last block of moduli|.
    pub tail_indicator: T,
}

impl<T: Real> CoefficientEstimate<T> {
    /// Nearest integer to the real part and the distance to it.
    pub fn rounded(&self) -> (BigInt, f64) {
        let r = self.value.re.round_to_bigint();
        let d = (self.value.re.clone() - T::from_bigint(&r, self.value.re.bits())).abs().to_f64();
        (r, d)
    }

    /// Whether |Im| is below `bound`.
    pub fn is_real_within(&self, bound: f64) -> bool {
        self.value.im.abs().to_f64() < bound
    }
}

/// Imaginary-part tolerance: 2^(−bits/4), but never below the rounding
/// floor of the `f64` tail.
pub fn imaginary_bound(bits: usize) -> f64 {
    2f64.powi(-(bits as i32) / 4).max(1e-9)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiplierSystem {
    Trivial,
    Eta,
}

impl MultiplierSystem {
    pub fn weight(self) -> Q {
        match self {
            MultiplierSystem::Trivial => Q::from(0),
            MultiplierSystem::Eta => Q::new(1, 2),
        }
    }
}

/// I_ν(x) by its ascending series, for ν = 1/2 or a nonnegative integer.
pub fn bessel_i<T: Real>(nu: Q, x: &T) -> Result<T, RademacherError> {
    let half_order = nu == Q::new(1, 2);
    if !(half_order || (nu.is_integer() && *nu.numer() >= 0)) {
        return Err(RademacherError::BesselOrder(nu));
    }
    let bits = x.bits();
    if *x <= T::from_i64(0, bits) {
        return Err(RademacherError::BesselDomain);
    }
    let half = x.ldexp(-1);
    let q = half.clone() * half.clone();
    let mut term = if half_order {
        // Γ(3/2) = √π/2
        half.sqrt() / T::pi(bits).sqrt().ldexp(-1)
    } else {
        let k = *nu.numer();
        let mut t = half.powi(k as u32);
        for j in 2..=k {
            t = t / T::from_i64(j, bits);
        }
        t
    };
    let mut sum = term.clone();
    let eps = T::epsilon(bits + 16);
    let peak = x.to_f64() / 2.0;
    let (num, den) = (*nu.numer(), *nu.denom());
    let mut k: i64 = 0;
    loop {
        k += 1;
        // term_k = term_{k−1}·(x/2)²/(k(k+ν))
        let denom = T::from_ratio(k * (k * den + num), den, bits);
        term = term * q.clone() / denom;
        sum = sum + term.clone();
        if (k as f64) > peak && term <= sum.clone() * eps.clone() {
            break;
        }
    }
    Ok(sum)
}

/// Dedekind sum s(d, c) for c > 0, by reciprocity.
pub fn dedekind_sum(d: i64, c: i64) -> Q {
    assert!(c > 0);
    assert_eq!(d.gcd(&c), 1, "s(d, c) needs coprime arguments");
    let mut sign = Q::from(1);
    let mut total = Q::from(0);
    let (mut d, mut c) = (d.rem_euclid(c), c);
    // s(d,c) + s(c,d) = (d/c + c/d + 1/(cd))/12 − 1/4
    while c > 1 && d > 0 {
        let rec = (Q::new(d, c) + Q::new(c, d) + Q::new(1, c * d)) / 12 - Q::new(1, 4);
        total += sign * rec;
        sign = -sign;
        let next = c.rem_euclid(d);
        c = d;
        d = next;
    }
    total
}

/// Normalize to c > 0, or c = 0 and d > 0.
pub fn normalize_sign(m: &IntMatrix) -> IntMatrix {
    if m.c < 0 || (m.c == 0 && m.d < 0) {
        m.neg()
    } else {
        *m
    }
}

/// ν_η(M) with η(Mτ) = ν_η(M)·(cτ + d)^(1/2)·η(τ), principal branch, after
/// replacing M by −M when needed to make the lower row positive.
pub fn eta_multiplier(m: &IntMatrix) -> RootOfUnity {
    assert_eq!(m.det(), 1);
    let m = normalize_sign(m);
    let turns = if m.c == 0 {
        Q::new(m.b, 24)
    } else {
        Q::new(m.a + m.d, 24 * m.c) - dedekind_sum(m.d, m.c) / 2 - Q::new(1, 8)
    };
    let r = RootOfUnity::from_turns(turns);
    debug_assert_eq!(24 % r.n, 0);
    r
}

fn turns_to_complex<T: Real>(t: Q, bits: usize) -> Complex<T> {
    let t = t - t.floor();
    if t.is_zero() {
        return Complex::new(T::from_i64(1, bits), T::from_i64(0, bits));
    }
    let angle = T::pi(bits).ldexp(1) * T::from_ratio(*t.numer(), *t.denom(), bits);
    Complex::new(angle.cos(), angle.sin())
}

fn root_to_complex<T: Real>(r: RootOfUnity, bits: usize) -> Complex<T> {
    turns_to_complex(r.turns(), bits)
}

fn cusp_width_of(level: i64, l: &IntMatrix) -> i64 {
    level / (l.c * l.c).gcd(&level)
}

fn inv_mod(a: i64, c: i64) -> i64 {
    if c == 1 {
        return 0;
    }
    let e = a.extended_gcd(&c);
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(c)
}

/// Terms of the Kloosterman sum at modulus c as (d, turns of everything but
/// the n·d/c part), or `None` when no residue qualifies.
///
/// a runs over 0 ≤ a < c·t with (a, c) = 1 and [[a, b], [c, d]] ∈ L⁻¹Γ_0(N),
/// d = a⁻¹ mod c. The term is χ(X)·e(m·a/c) with χ = 1 or ν_η(X)⁻¹.
fn kloosterman_terms(mult: MultiplierSystem, level: i64, l: &IntMatrix, m: Q, c: i64) -> Option<Vec<(i64, Q)>> {
    assert!(c >= 1);
    if c.gcd(&level) != l.c.gcd(&level) {
        return None;
    }
    let t = cusp_width_of(level, l);
    // L₂₁·a ≡ −L₂₂·c (mod N) pins a to one class mod N/(L₂₁, N)
    let g = l.c.gcd(&level);
    let step = level / g;
    let unit = (l.c / g).rem_euclid(step);
    let (start, step) = if unit.gcd(&step) == 1 {
        ((-(l.d * (c / g)) * inv_mod(unit, step)).rem_euclid(step), step)
    } else {
        (0, 1)
    };
    let mut out = Vec::new();
    for a in (start..c * t).step_by(step as usize) {
        if a.gcd(&c) != 1 || (l.c * a + l.d * c) % level != 0 {
            continue;
        }
        let d = inv_mod(a, c);
        let mut turns = m * Q::new(a, c);
        if mult == MultiplierSystem::Eta {
            let b = (a * d - 1) / c;
            turns -= eta_multiplier(&IntMatrix::new(a, b, c, d)).turns();
        }
        out.push((d, turns - turns.floor()));
    }
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

/// Σ χ(X)·e((m·a + n·d)/c) over the residues described for the cusp with
/// scaling matrix `l` on Γ_0(level). `None` flags an empty congruence class.
pub fn kloosterman_sum<T: Real>(
    mult: MultiplierSystem,
    level: i64,
    l: &IntMatrix,
    m: Q,
    n: Q,
    c: i64,
    bits: usize,
) -> Option<Complex<T>> {
    let terms = kloosterman_terms(mult, level, l, m, c)?;
    let mut s = Complex::new(T::from_i64(0, bits), T::from_i64(0, bits));
    for (d, turns) in terms {
        s = s + turns_to_complex::<T>(turns + n * Q::new(d, c), bits);
    }
    Some(s)
}

/// Rademacher series for c(n) with the Bessel function expanded:
/// c(n) = Σ_c S(−1, n; c)·Σ_k (4π²)^(k+1) n^k / (c^(2k+2) k! (k+1)!).
pub fn classical_c(n: i64, cfg: &PrecisionConfig) -> CoefficientEstimate<BigReal> {
    assert!(n >= 1);
    let bits = cfg.working_bits.max(auto_bits(4.0 * std::f64::consts::PI * (n as f64).sqrt(), 1));
    let zero = BigReal::from_i64(0, bits);
    let four_pi2 = BigReal::pi(bits).powi(2).ldexp(2);
    let nn = BigReal::from_i64(n, bits);
    let eps = BigReal::epsilon(bits + 16);
    let mut total = zero.clone();
    let mut last_block = zero.clone();
    let block_start = cfg.c_max.saturating_sub(25);
    for c in 1..=cfg.c_max as i64 {
        let mut k_sum = zero.clone();
        for a in 0..c {
            if a.gcd(&c) != 1 {
                continue;
            }
            let d = inv_mod(a, c);
            k_sum = k_sum + turns_to_complex::<BigReal>(Q::new(-a + n * d, c), bits).re;
        }
        let c2 = BigReal::from_i64(c * c, bits);
        let x = four_pi2.clone() * nn.clone() / c2.clone();
        // Σ_k x^k/(k!(k+1)!) · 4π²/c²
        let mut term = four_pi2.clone() / c2;
        let mut series = term.clone();
        let mut k = 0i64;
        loop {
            k += 1;
            term = term * x.clone() / BigReal::from_i64(k * (k + 1), bits);
            series = series.clone() + term.clone();
            if k as f64 > x.to_f64().sqrt() && term <= series.clone() * eps.clone() {
                break;
            }
        }
        let contrib = k_sum * series;
        if c as u64 > block_start {
            last_block = last_block + contrib.clone();
        }
        total = total + contrib;
    }
    CoefficientEstimate { value: Complex::new(total, zero), c_max_used: cfg.c_max, tail_indicator: last_block.abs() }
}

/// One cusp's share of a Rademacher sum.
#[derive(Clone, Debug)]
struct Channel {
    /// ε^m, with e(−1/8) folded in for weight 1/2.
    eps: RootOfUnity,
    l: IntMatrix,
    /// polar exponent magnitude: m·μ, or μ − 1/24 for weight 1/2
    x: Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Weight {
    Zero,
    Half,
}

impl Weight {
    fn mult(self) -> MultiplierSystem {
        match self {
            Weight::Zero => MultiplierSystem::Trivial,
            Weight::Half => MultiplierSystem::Eta,
        }
    }

    fn bessel_order(self) -> Q {
        match self {
            Weight::Zero => Q::from(1),
            Weight::Half => Q::new(1, 2),
        }
    }

    /// n + κ_∞.
    fn y(self, n: i64) -> Q {
        match self {
            Weight::Zero => Q::from(n),
            Weight::Half => Q::from(n) + Q::new(1, 24),
        }
    }
}

struct Plan {
    level: i64,
    weight: Weight,
    channels: Vec<Channel>,
}

impl Plan {
    fn new(sym: &GroupSymbol, m: i64, weight: Weight) -> Result<Self, RademacherError> {
        if m < 1 {
            return Err(RademacherError::Domain(format!("pole order m = {m} must be positive")));
        }
        let level = sym.level() as i64;
        let mut channels = Vec::new();
        for p in pole_cusps(sym) {
            let mu = p.pole.pole_order;
            let (eps, x) = match weight {
                Weight::Zero => (p.pole.eps.pow(m), mu * m),
                Weight::Half => {
                    let x = mu - Q::new(1, 24);
                    if x <= Q::from(0) {
                        continue;
                    }
                    (p.pole.eps.mul(RootOfUnity::new(-1, 8)), x)
                }
            };
            channels.push(Channel { eps, l: p.datum.scaling, x });
        }
        if channels.is_empty() {
            return Err(RademacherError::Domain(format!("{} has no pole cusps", sym.text())));
        }
        Ok(Plan { level, weight, channels })
    }

    fn width(&self, ch: &Channel) -> i64 {
        cusp_width_of(self.level, &ch.l)
    }

    /// log₂ of a bound on the modulus-c term of channel `ch` at index y.
    fn log2_bound(&self, ch: &Channel, y: Q, c: i64) -> f64 {
        let x = q_f64(ch.x);
        let y = q_f64(y);
        let arg = 4.0 * std::f64::consts::PI * (x * y).sqrt() / c as f64;
        let pref = match self.weight {
            Weight::Zero => 2.0 * std::f64::consts::PI * (x / y).sqrt(),
            Weight::Half => 2.0 * std::f64::consts::PI * (x / y).powf(0.25),
        };
        (pref * self.width(ch) as f64).log2() + log2_bessel(arg)
    }

    fn needed_bits(&self, ns: &[i64], floor: usize) -> usize {
        let top = ns.iter().copied().max().unwrap_or(1);
        let mut need = floor;
        for ch in &self.channels {
            need = need.max(self.log2_bound(ch, self.weight.y(top), 1).ceil() as usize + 64);
        }
        need
    }

    /// Contribution of modulus c to every requested coefficient.
    fn block<T: Real>(&self, ns: &[i64], c: i64, bits: usize) -> Vec<Complex<T>> {
        let zero = || Complex::new(T::from_i64(0, bits), T::from_i64(0, bits));
        let mut out: Vec<Complex<T>> = (0..ns.len()).map(|_| zero()).collect();
        for ch in &self.channels {
            let Some(terms) = kloosterman_terms(self.weight.mult(), self.level, &ch.l, -ch.x, c) else {
                continue;
            };
            let y0 = self.weight.y(0);
            let small = ns.iter().all(|&n| self.log2_bound(ch, self.weight.y(n), c) < 10.0);
            let eps = root_to_complex::<T>(ch.eps, bits);
            if small {
                let s = kloosterman_f64(&terms, y0, c, ns);
                for (i, &n) in ns.iter().enumerate() {
                    let v = self.scalar_f64(ch, n, c) * s[i];
                    out[i] = out[i].clone() + eps.clone() * Complex::new(T::from_f64(v.re, bits), T::from_f64(v.im, bits));
                }
            } else {
                let mut w: Vec<Complex<T>> = (0..c).map(|_| zero()).collect();
                for &(d, turns) in &terms {
                    w[d as usize] = w[d as usize].clone() + turns_to_complex::<T>(turns + y0 * Q::new(d, c), bits);
                }
                let roots: Vec<Complex<T>> = (0..c).map(|k| turns_to_complex::<T>(Q::new(k, c), bits)).collect();
                for (i, &n) in ns.iter().enumerate() {
                    let mut s = zero();
                    for (d, wd) in w.iter().enumerate() {
                        if !wd.re.is_zero() || !wd.im.is_zero() {
                            let k = (n * d as i64).rem_euclid(c) as usize;
                            s = s + wd.clone() * roots[k].clone();
                        }
                    }
                    let f = self.scalar::<T>(ch, n, c, bits);
                    out[i] = out[i].clone() + eps.clone() * s * Complex::new(f, T::from_i64(0, bits));
                }
            }
        }
        out
    }

    /// prefactor·I_ν(4π√(xy)/c)/c.
    fn scalar<T: Real>(&self, ch: &Channel, n: i64, c: i64, bits: usize) -> T {
        let y = self.weight.y(n);
        let x = T::from_ratio(*ch.x.numer(), *ch.x.denom(), bits);
        let yy = T::from_ratio(*y.numer(), *y.denom(), bits);
        let two_pi = T::pi(bits).ldexp(1);
        let cc = T::from_i64(c, bits);
        let arg = two_pi.clone().ldexp(1) * (x.clone() * yy.clone()).sqrt() / cc.clone();
        let pref = match self.weight {
            Weight::Zero => two_pi * (x / yy).sqrt(),
            Weight::Half => two_pi * (x / yy).sqrt().sqrt(),
        };
        pref * bessel_i(self.weight.bessel_order(), &arg).expect("positive argument") / cc
    }

    fn scalar_f64(&self, ch: &Channel, n: i64, c: i64) -> f64 {
        self.scalar::<f64>(ch, n, c, 53)
    }

    /// Partial sums at each threshold (ascending) for every n.
    fn partial_sums<T: Real>(&self, ns: &[i64], thresholds: &[u64], bits: usize) -> Vec<Vec<CoefficientEstimate<T>>> {
        let c_max = *thresholds.last().expect("at least one threshold");
        let blocks: Vec<Vec<Complex<T>>> =
            (1..=c_max as i64).into_par_iter().map(|c| self.block::<T>(ns, c, bits)).collect();
        let zero = || Complex::new(T::from_i64(0, bits), T::from_i64(0, bits));
        let mut running: Vec<Complex<T>> = (0..ns.len()).map(|_| zero()).collect();
        let mut out = Vec::new();
        for &k in thresholds {
            let tail_start = k.saturating_sub(tail_block(self.level)) as usize;
            let tails: Vec<T> = (0..ns.len())
                .map(|i| {
                    let mut s = zero();
                    for b in &blocks[tail_start..k as usize] {
                        s = s + b[i].clone();
                    }
                    s.norm_sqr().sqrt()
                })
                .collect();
            let prev = out.len();
            let from = if prev == 0 { 0 } else { thresholds[prev - 1] as usize };
            for b in &blocks[from..k as usize] {
                for (r, v) in running.iter_mut().zip(b) {
                    *r = r.clone() + v.clone();
                }
            }
            out.push(
                running
                    .iter()
                    .zip(tails)
                    .map(|(v, t)| CoefficientEstimate { value: v.clone(), c_max_used: k, tail_indicator: t })
                    .collect(),
            );
        }
        out
    }
}

fn tail_block(level: i64) -> u64 {
    (level as u64).max(25)
}

fn q_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// log₂ I_ν(z), ν ∈ {1/2, 1}, rough but safe for deciding precision.
fn log2_bessel(z: f64) -> f64 {
    if z < 20.0 {
        (z.cosh() + 1.0).log2()
    } else {
        z / std::f64::consts::LN_2 - 0.5 * (2.0 * std::f64::consts::PI * z).log2() + 1.0
    }
}

fn auto_bits(bessel_arg: f64, floor: usize) -> usize {
    ((log2_bessel(bessel_arg) + 8.0).ceil() as usize + 64).max(floor)
}

/// Σ_terms e(turns + (n + y0)·d/c) for all n, in double precision.
fn kloosterman_f64(terms: &[(i64, Q)], y0: Q, c: i64, ns: &[i64]) -> Vec<Complex<f64>> {
    let tau = 2.0 * std::f64::consts::PI;
    let mut w = vec![Complex::new(0.0, 0.0); c as usize];
    for &(d, turns) in terms {
        let t = q_f64(turns) + q_f64(y0) * d as f64 / c as f64;
        w[d as usize] += Complex::from_polar(1.0, tau * t);
    }
    if ns.len() > 8 && c > 1 {
        let mut planner = FftPlanner::<f64>::new();
        // the inverse transform computes Σ_d w[d]·e(kd/c)
        planner.plan_fft_inverse(c as usize).process(&mut w);
        ns.iter().map(|&n| w[n.rem_euclid(c) as usize]).collect()
    } else {
        ns.iter()
            .map(|&n| {
                w.iter()
                    .enumerate()
                    .map(|(d, wd)| wd * Complex::from_polar(1.0, tau * ((n * d as i64).rem_euclid(c)) as f64 / c as f64))
                    .sum()
            })
            .collect()
    }
}

fn working_bits(plan: &Plan, ns: &[i64], cfg: &PrecisionConfig) -> usize {
    plan.needed_bits(ns, cfg.working_bits)
}

/// Coefficients of q^n in T_g^(−m), n ∈ `ns`, partially summed to each
/// threshold in `thresholds` (ascending).
pub fn tg_partial_sums(
    sym: &GroupSymbol,
    m: i64,
    ns: &[i64],
    thresholds: &[u64],
    cfg: &PrecisionConfig,
) -> Result<Vec<Vec<CoefficientEstimate<BigReal>>>, RademacherError> {
    check_ns(ns, 1)?;
    check_thresholds(thresholds)?;
    let plan = Plan::new(sym, m, Weight::Zero)?;
    let bits = working_bits(&plan, ns, cfg);
    Ok(plan.partial_sums(ns, thresholds, bits))
}

/// The same sums in any scalar type, at that type's precision.
pub fn tg_partial_sums_in<T: Real>(
    sym: &GroupSymbol,
    m: i64,
    ns: &[i64],
    thresholds: &[u64],
    bits: usize,
) -> Result<Vec<Vec<CoefficientEstimate<T>>>, RademacherError> {
    check_ns(ns, 1)?;
    check_thresholds(thresholds)?;
    let plan = Plan::new(sym, m, Weight::Zero)?;
    Ok(plan.partial_sums(ns, thresholds, bits))
}

fn check_ns(ns: &[i64], min: i64) -> Result<(), RademacherError> {
    match ns.iter().find(|&&n| n < min) {
        Some(n) => Err(RademacherError::Domain(format!("coefficient index {n} below {min}"))),
        None => Ok(()),
    }
}

fn check_thresholds(t: &[u64]) -> Result<(), RademacherError> {
    if t.is_empty() || t[0] == 0 || t.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RademacherError::Config("thresholds must be positive and increasing".into()));
    }
    Ok(())
}

/// Coefficient of q^n in T_g^(−m).
pub fn tg_coefficient(sym: &GroupSymbol, m: i64, n: i64, cfg: &PrecisionConfig) -> Result<CoefficientEstimate<BigReal>, RademacherError> {
    Ok(tg_coefficients(sym, m, &[n], cfg)?.remove(0))
}

pub fn tg_coefficients(
    sym: &GroupSymbol,
    m: i64,
    ns: &[i64],
    cfg: &PrecisionConfig,
) -> Result<Vec<CoefficientEstimate<BigReal>>, RademacherError> {
    Ok(tg_partial_sums(sym, m, ns, &[cfg.c_max], cfg)?.remove(0))
}

/// Coefficient of q^(n+1/24) in the weight-1/2 Rademacher sum Û_g.
pub fn ug_hat_coefficient(sym: &GroupSymbol, n: i64, cfg: &PrecisionConfig) -> Result<CoefficientEstimate<BigReal>, RademacherError> {
    Ok(ug_hat_coefficients(sym, &[n], cfg)?.remove(0))
}

pub fn ug_hat_coefficients(
    sym: &GroupSymbol,
    ns: &[i64],
    cfg: &PrecisionConfig,
) -> Result<Vec<CoefficientEstimate<BigReal>>, RademacherError> {
    check_ns(ns, 0)?;
    let plan = Plan::new(sym, 1, Weight::Half)?;
    let bits = working_bits(&plan, ns, cfg);
    Ok(plan.partial_sums(ns, &[cfg.c_max], bits).remove(0))
}

/// Per-coefficient evidence that rounding was safe.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundingCertificate {
    pub c_max: u64,
    pub working_bits: usize,
    /// (n, |Re − nearest integer|, |Im|)
    pub entries: Vec<(i64, f64, f64)>,
}

impl RoundingCertificate {
    pub fn worst_distance(&self) -> f64 {
        self.entries.iter().map(|e| e.1).fold(0.0, f64::max)
    }
}

/// The integer expansion q^(−m) + Σ_{n≥1} c_g(−m, n)qⁿ with `prec`
/// coefficients from q^(−m), obtained by rounding the Rademacher sums.
pub fn rounded_tower_series(
    sym: &GroupSymbol,
    m: i64,
    prec: usize,
    cfg: &PrecisionConfig,
) -> Result<(ZSeries, RoundingCertificate), RademacherError> {
    let top = -m + prec as i64 - 1;
    let ns: Vec<i64> = (1..=top).collect();
    let plan = Plan::new(sym, m, Weight::Zero)?;
    let bits = working_bits(&plan, &ns, cfg);
    let ests = if ns.is_empty() { Vec::new() } else { plan.partial_sums::<BigReal>(&ns, &[cfg.c_max], bits).remove(0) };
    let bound = imaginary_bound(bits);
    let mut entries = Vec::new();
    let mut coeffs = Vec::new();
    for (n, est) in ns.iter().zip(&ests) {
        let (r, dist) = est.rounded();
        let im = est.value.im.abs().to_f64();
        if dist >= 0.25 {
            return Err(RademacherError::Certificate { n: *n, distance: dist });
        }
        if im >= bound {
            return Err(RademacherError::Imaginary { n: *n, im });
        }
        entries.push((*n, dist, im));
        coeffs.push(r);
    }
    let series = QSeries::from_fn(-m, prec, |k| {
        if k == -m {
            BigInt::one()
        } else if k <= 0 {
            BigInt::zero()
        } else {
            coeffs[(k - 1) as usize].clone()
        }
    });
    Ok((series, RoundingCertificate { c_max: cfg.c_max, working_bits: bits, entries }))
}

/// T_g through q^(prec−2), rounded from its Rademacher sum.
pub fn rounded_tg_series(sym: &GroupSymbol, prec: usize, cfg: &PrecisionConfig) -> Result<(ZSeries, RoundingCertificate), RademacherError> {
    rounded_tower_series(sym, 1, prec, cfg)
}

/// Rounded tower series for every class, computed once per distinct symbol.
pub fn rounded_class_traces(
    symbols: &BTreeMap<String, GroupSymbol>,
    m: i64,
    prec: usize,
    cfg: &PrecisionConfig,
) -> Result<(BTreeMap<String, ZSeries>, BTreeMap<String, RoundingCertificate>), (String, RademacherError)> {
    let mut by_symbol: BTreeMap<String, (ZSeries, RoundingCertificate)> = BTreeMap::new();
    for sym in symbols.values() {
        let key = sym.text();
        if !by_symbol.contains_key(&key) {
            let r = rounded_tower_series(sym, m, prec, cfg).map_err(|e| (key.clone(), e))?;
            by_symbol.insert(key, r);
        }
    }
    let traces = symbols.iter().map(|(name, sym)| (name.clone(), by_symbol[&sym.text()].0.clone())).collect();
    let certs = by_symbol.into_iter().map(|(k, (_, c))| (k, c)).collect();
    Ok((traces, certs))
}

/// Estimated |error| of a partial sum from the size of its last block; the
/// sums converge only conditionally, so this is a heuristic.
pub fn tail_estimate<T: Real>(est: &CoefficientEstimate<T>) -> f64 {
    est.tail_indicator.abs().to_f64()
}
