//! Congruence subgroups, cusps and the eigenvalue characters of the
//! moonshine groups.
//!
//! A Monster class g determines a group symbol `N||h+e,f,...`. The group
//! Γ_g is the kernel of a character σ_g on the eigengroup
//! Γ_0(N|h)+e,f,..., and T_g is a Hauptmodul for Γ_g. At a cusp of
//! Γ_0(Nh) the expansion of T_g is either holomorphic or starts with
//! ε·q^(-μ) for a root of unity ε; [`epsilon_g`] computes that datum.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use thiserror::Error;

pub type Q = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("malformed group symbol {0:?}")]
    Malformed(String),
    #[error("h = {h} does not divide gcd(N, 24) for N = {n}")]
    BadH { n: u64, h: u64 },
    #[error("{e} is not an exact divisor of {m}")]
    NotExactDivisor { e: u64, m: u64 },
    #[error("matrix {0:?} does not have the required shape")]
    Shape(String),
    #[error("monster_groups data: {0}")]
    Data(String),
}

/// Exact root of unity exp(2πi·k/n), kept reduced with 0 ≤ k < n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    pub k: i64,
    pub n: i64,
}

impl RootOfUnity {
    pub fn new(k: i64, n: i64) -> Self {
        assert!(n > 0);
        let k = k.rem_euclid(n);
        let g = k.gcd(&n).max(1);
        RootOfUnity { k: k / g, n: n / g }
    }

    pub fn one() -> Self {
        RootOfUnity { k: 0, n: 1 }
    }

    pub fn from_turns(t: Q) -> Self {
        Self::new(*t.numer(), *t.denom())
    }

    pub fn turns(&self) -> Q {
        Q::new(self.k, self.n)
    }

    pub fn mul(self, o: Self) -> Self {
        Self::from_turns(self.turns() + o.turns())
    }

    pub fn pow(self, e: i64) -> Self {
        Self::new(self.k * e, self.n)
    }

    pub fn inv(self) -> Self {
        Self::new(-self.k, self.n)
    }

    /// (re, im) in double precision.
    pub fn to_f64(&self) -> (f64, f64) {
        let t = 2.0 * std::f64::consts::PI * self.k as f64 / self.n as f64;
        (t.cos(), t.sin())
    }

    pub fn order(&self) -> i64 {
        self.n
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.k, self.n) {
            (0, _) => write!(f, "1"),
            (1, 2) => write!(f, "-1"),
            (1, 4) => write!(f, "i"),
            (3, 4) => write!(f, "-i"),
            (k, n) => write!(f, "e({k}/{n})"),
        }
    }
}

/// The group datum `N||h+e,f,...` with its full Atkin–Lehner set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSymbol {
    pub n: u64,
    pub h: u64,
    pub wset: BTreeSet<u64>,
    pub class_name: String,
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// `e` exactly divides `m`: e | m and gcd(e, m/e) = 1.
pub fn is_exact_divisor(e: u64, m: u64) -> bool {
    e > 0 && m % e == 0 && e.gcd(&(m / e)) == 1
}

fn circ(e: u64, f: u64) -> u64 {
    let g = e.gcd(&f);
    e * f / (g * g)
}

impl GroupSymbol {
    /// Level of the subgroup Γ_0(Nh) on which T_g is invariant.
    pub fn level(&self) -> u64 {
        self.n * self.h
    }

    /// λ_g = −1 if N/h lies in W_g, else +1.
    pub fn lambda(&self) -> i64 {
        if self.wset.contains(&(self.n / self.h)) {
            -1
        } else {
            1
        }
    }

    pub fn with_class(mut self, name: &str) -> Self {
        self.class_name = name.to_string();
        self
    }

    /// Symbol text in the appendix grammar.
    pub fn text(&self) -> String {
        let mut s = self.n.to_string();
        if self.h != 1 {
            s.push_str(&format!("||{}", self.h));
        }
        let m = self.n / self.h;
        let others: Vec<u64> = self.wset.iter().copied().filter(|&e| e != 1).collect();
        if others.is_empty() {
            return s;
        }
        let all: BTreeSet<u64> = divisors(m).into_iter().filter(|&e| is_exact_divisor(e, m)).collect();
        if all == self.wset {
            s.push('+');
        } else {
            // list generators greedily; closure reproduces the set
            let mut gens: Vec<u64> = Vec::new();
            let mut span: BTreeSet<u64> = BTreeSet::from([1]);
            for &e in &others {
                if !span.contains(&e) {
                    gens.push(e);
                    span = close(span.iter().copied().chain([e]).collect());
                }
            }
            s.push('+');
            s.push_str(&gens.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
        }
        s
    }
}

fn close(mut set: BTreeSet<u64>) -> BTreeSet<u64> {
    loop {
        let items: Vec<u64> = set.iter().copied().collect();
        let before = set.len();
        for &a in &items {
            for &b in &items {
                set.insert(circ(a, b));
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

impl FromStr for GroupSymbol {
    type Err = SymbolError;
    fn from_str(s: &str) -> Result<Self, SymbolError> {
        parse_group_symbol(s)
    }
}

impl fmt::Display for GroupSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// Parse `N`, `N+`, `N+e,f,...`, `N||h`, `N||h+` or `N||h+e,f,...`.
pub fn parse_group_symbol(text: &str) -> Result<GroupSymbol, SymbolError> {
    let bad = || SymbolError::Malformed(text.to_string());
    let t = text.trim();
    let (base, rest) = match t.split_once('+') {
        Some((b, r)) => (b, Some(r)),
        None => (t, None),
    };
    let num = |s: &str| -> Result<u64, SymbolError> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse::<u64>().ok().filter(|&v| v > 0).ok_or_else(bad)
    };
    let (n, h) = match base.split_once("||") {
        Some((a, b)) => (num(a)?, num(b)?),
        None => (num(base)?, 1),
    };
    if n % h != 0 || 24 % h != 0 {
        return Err(SymbolError::BadH { n, h });
    }
    let m = n / h;
    let wset = match rest {
        None => BTreeSet::from([1]),
        Some("") => divisors(m).into_iter().filter(|&e| is_exact_divisor(e, m)).collect(),
        Some(list) => {
            let mut set = BTreeSet::from([1]);
            for item in list.split(',') {
                let e = num(item.trim())?;
                if !is_exact_divisor(e, m) {
                    return Err(SymbolError::NotExactDivisor { e, m });
                }
                set.insert(e);
            }
            close(set)
        }
    };
    Ok(GroupSymbol { n, h, wset, class_name: String::new() })
}

/// Bundled transcription of the class → symbol table.
pub const MONSTER_GROUPS: &str = include_str!("../data/monster_groups");

/// Split a class label such as `"23AB"` into `["23A", "23B"]`.
pub fn expand_class_label(label: &str) -> Vec<String> {
    let digits: String = label.chars().take_while(|c| c.is_ascii_digit()).collect();
    label[digits.len()..].chars().map(|l| format!("{digits}{l}")).collect()
}

/// Parse a `monster_groups` file: one `class symbol` record per line.
pub fn parse_monster_groups(data: &str) -> Result<BTreeMap<String, GroupSymbol>, SymbolError> {
    let mut out = BTreeMap::new();
    for (lineno, line) in data.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(label), Some(sym), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(SymbolError::Data(format!("line {}: expected `class symbol`", lineno + 1)));
        };
        let names = expand_class_label(label);
        if names.is_empty() || !label.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(SymbolError::Data(format!("line {}: bad class label {label:?}", lineno + 1)));
        }
        let parsed = parse_group_symbol(sym)?;
        for name in names {
            if out.insert(name.clone(), parsed.clone().with_class(&name)).is_some() {
                return Err(SymbolError::Data(format!("duplicate class {name}")));
            }
        }
    }
    Ok(out)
}

/// Class name → symbol for every Monster class, from the bundled table.
pub fn load_monster_symbols() -> Result<BTreeMap<String, GroupSymbol>, SymbolError> {
    parse_monster_groups(MONSTER_GROUPS)
}

/// Integer 2×2 matrix [[a, b], [c, d]].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMatrix {
    pub const IDENTITY: IntMatrix = IntMatrix { a: 1, b: 0, c: 0, d: 1 };
    pub const S: IntMatrix = IntMatrix { a: 0, b: -1, c: 1, d: 0 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMatrix { a, b, c, d }
    }

    /// Builds a matrix and checks its determinant.
    pub fn with_det(a: i64, b: i64, c: i64, d: i64, det: i64) -> Result<Self, SymbolError> {
        let m = IntMatrix { a, b, c, d };
        if m.det() != det {
            return Err(SymbolError::Shape(format!("{m:?} has determinant {} not {det}", m.det())));
        }
        Ok(m)
    }

    pub fn t(r: i64) -> Self {
        IntMatrix { a: 1, b: r, c: 0, d: 1 }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        IntMatrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> IntMatrix {
        debug_assert_eq!(self.det(), 1);
        IntMatrix { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn in_gamma0(&self, n: i64) -> bool {
        self.det() == 1 && self.c.rem_euclid(n) == 0
    }

    /// Image of the cusp α/γ (∞ = (1, 0)).
    pub fn act(&self, cusp: Cusp) -> Cusp {
        Cusp::new(self.a * cusp.alpha + self.b * cusp.gamma, self.c * cusp.alpha + self.d * cusp.gamma)
    }
}

/// An element [[a·e, b/h], [c·N, d·e]] of the eigengroup, stored exactly.
/// Its determinant is `e`, i.e. a·d·e − b·c·N/(e·h) = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EigengroupElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub e: i64,
}

/// 2×2 matrix over Q.
pub type QMatrix = [[Q; 2]; 2];

pub fn qmul(x: &QMatrix, y: &QMatrix) -> QMatrix {
    [
        [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
        [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
    ]
}

impl EigengroupElement {
    pub fn new(sym: &GroupSymbol, a: i64, b: i64, c: i64, d: i64, e: i64) -> Result<Self, SymbolError> {
        let el = EigengroupElement { a, b, c, d, e };
        let det = el.matrix(sym);
        let det = det[0][0] * det[1][1] - det[0][1] * det[1][0];
        if det != Q::from_integer(e) || !sym.wset.contains(&(e as u64)) {
            return Err(SymbolError::Shape(format!("{el:?} for {sym}")));
        }
        Ok(el)
    }

    /// Recover the integer parameters of a rational matrix of eigengroup shape.
    pub fn from_matrix(sym: &GroupSymbol, m: &QMatrix, e: i64) -> Result<Self, SymbolError> {
        let (n, h) = (sym.n as i64, sym.h as i64);
        let shape = || SymbolError::Shape(format!("{m:?} for {sym} with e = {e}"));
        let int = |q: Q| if q.is_integer() { Ok(q.to_integer()) } else { Err(shape()) };
        let a = int(m[0][0] / e)?;
        let b = int(m[0][1] * h)?;
        let c = int(m[1][0] / n)?;
        let d = int(m[1][1] / e)?;
        Self::new(sym, a, b, c, d, e)
    }

    pub fn matrix(&self, sym: &GroupSymbol) -> QMatrix {
        let (n, h) = (sym.n as i64, sym.h as i64);
        [
            [Q::from_integer(self.a * self.e), Q::new(self.b, h)],
            [Q::from_integer(self.c * n), Q::from_integer(self.d * self.e)],
        ]
    }
}

/// Largest divisor of `h` coprime to `e`.
fn coprime_part(h: i64, e: i64) -> i64 {
    let mut r = h;
    loop {
        let g = r.gcd(&e);
        if g == 1 {
            return r;
        }
        r /= g;
    }
}

/// The eigenvalue σ_g(M), a root of unity of order dividing h.
///
/// M is written as T_{−B/h}·M̂·V_{−C}·T_{−A/h} with T_x = [[1, x], [0, 1]],
/// V_C = [[1, 0], [C·N, 1]] and M̂ an Atkin–Lehner element of Γ_0(Nh) for the
/// exact divisor e·h_e², where h_e = h / h_ē and h_ē is the largest divisor of
/// h prime to e. σ_g is trivial on M̂, equals e(−1/h) on T_{1/h} and e(−λ_g/h)
/// on V_1, so σ_g(M) = e((A + B + λ_g·C)/h).
pub fn sigma_g(sym: &GroupSymbol, m: &EigengroupElement) -> Result<RootOfUnity, SymbolError> {
    let (n, h, e) = (sym.n as i128, sym.h as i128, m.e as i128);
    let hbar = coprime_part(sym.h as i64, m.e) as i128;
    let he = h / hbar;
    let big_e = e * he * he;
    let level = n * h;
    // h·M is integral
    let hm = [[m.a as i128 * e * h, m.b as i128], [m.c as i128 * n * h, m.d as i128 * e * h]];
    let h3 = h * h * h;
    let mut found: Option<i128> = None;
    for b in 0..h {
        // [[h, B], [0, h]]·(hM)
        let l = [
            [h * hm[0][0] + b * hm[1][0], h * hm[0][1] + b * hm[1][1]],
            [h * hm[1][0], h * hm[1][1]],
        ];
        for a in 0..h {
            // ·[[h, A], [0, h]]
            let la = [
                [l[0][0] * h, l[0][0] * a + l[0][1] * h],
                [l[1][0] * h, l[1][0] * a + l[1][1] * h],
            ];
            for c in 0..h {
                // ·[[1, 0], [C·N, 1]]
                let p = [
                    [la[0][0] + la[0][1] * c * n, la[0][1]],
                    [la[1][0] + la[1][1] * c * n, la[1][1]],
                ];
                let scaled = p.map(|r| r.map(|x| x * he));
                if scaled.iter().flatten().any(|x| x % h3 != 0) {
                    continue;
                }
                let [[pp, _], [rr, ss]] = scaled.map(|r| r.map(|x| x / h3));
                if pp % big_e != 0 || ss % big_e != 0 || rr % level != 0 {
                    continue;
                }
                let v = (a + b + sym.lambda() as i128 * c).rem_euclid(h);
                match found {
                    None => found = Some(v),
                    Some(w) if w != v => {
                        return Err(SymbolError::Shape(format!("ambiguous σ_g for {m:?} in {sym}")))
                    }
                    _ => {}
                }
            }
        }
    }
    found
        .map(|v| RootOfUnity::new(v as i64, sym.h as i64))
        .ok_or_else(|| SymbolError::Shape(format!("{m:?} is not in the eigengroup of {sym}")))
}

/// Principal-part datum of T_g at a cusp: T_g|L = eps·q^(−pole_order) + O(1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CuspPole {
    pub eps: RootOfUnity,
    pub pole_order: Q,
    pub e: u64,
}

/// ε_g(L) for L = [[−δ, β], [γ, −α]] of determinant one.
///
/// Returns `None` when T_g|L is holomorphic at ∞.
pub fn epsilon_g(sym: &GroupSymbol, l: &IntMatrix) -> Option<CuspPole> {
    assert_eq!(l.det(), 1, "epsilon_g needs a determinant-one matrix");
    let (n, h) = (sym.n as i64, sym.h as i64);
    let gamma = l.c;
    let alpha = -l.d;
    let g = h.gcd(&gamma);
    let ratio = (gamma / g).gcd(&(n / h));
    let e = sym.wset.iter().copied().find(|&e| ratio * e as i64 * h == n)? as i64;
    let u = (0..e * h * h)
        .find(|&u| {
            let num = u * gamma - alpha * g;
            num % h == 0 && (num / h) % e == 0
        })
        .expect("u exists when the pole condition holds");
    let lq: QMatrix = [[Q::from(l.a), Q::from(l.b)], [Q::from(l.c), Q::from(l.d)]];
    let u_mat: QMatrix = [[Q::new(e * h, g), Q::new(u, h)], [Q::from(0), Q::new(g, h)]];
    let lu = qmul(&lq, &u_mat);
    let el = EigengroupElement::from_matrix(sym, &lu, e).expect("L·U lies in the eigengroup");
    let sigma = sigma_g(sym, &el).expect("σ_g defined on L·U");
    let eps = sigma.mul(RootOfUnity::from_turns(Q::new(u * g, e * h * h)));
    Some(CuspPole { eps, pole_order: Q::new(g * g, e * h * h), e: e as u64 })
}

/// A cusp α/γ; ∞ is (1, 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cusp {
    pub alpha: i64,
    pub gamma: i64,
}

impl Cusp {
    pub const INFINITY: Cusp = Cusp { alpha: 1, gamma: 0 };

    /// Reduced fraction with γ ≥ 0.
    pub fn new(alpha: i64, gamma: i64) -> Cusp {
        if gamma == 0 {
            return Cusp::INFINITY;
        }
        let g = alpha.gcd(&gamma);
        let s = gamma.signum();
        Cusp { alpha: s * alpha / g, gamma: s * gamma / g }
    }

    pub fn is_infinity(&self) -> bool {
        self.gamma == 0
    }

    /// Scaling matrix L = [[α, β], [γ, δ]] with L∞ = α/γ.
    ///
    /// Among solutions of αδ − βγ = 1 pick the smallest |β|, then the smallest
    /// |δ|, preferring nonnegative entries on ties.
    pub fn scaling_matrix(&self) -> IntMatrix {
        if self.is_infinity() {
            return IntMatrix::IDENTITY;
        }
        let (al, ga) = (self.alpha, self.gamma);
        if al == 0 {
            return IntMatrix::new(0, -1, 1, 0);
        }
        // δ ≡ α⁻¹ (mod γ) direction: α·δ = 1 + β·γ
        let ext = al.extended_gcd(&ga);
        debug_assert_eq!(ext.gcd.abs(), 1);
        // general solution: δ = δ0 + k·γ, β = β0 + k·α
        let s = ext.gcd.signum();
        let (d0, b0) = (ext.x * s, -ext.y * s);
        let mut best: Option<((i64, i64, bool, bool), IntMatrix)> = None;
        let k0 = if al != 0 { -b0 / al } else { 0 };
        for k in (k0 - 2)..=(k0 + 2) {
            let (b, d) = (b0 + k * al, d0 + k * ga);
            let key = (b.abs(), d.abs(), b < 0, d < 0);
            if best.as_ref().map_or(true, |(bk, _)| key < *bk) {
                best = Some((key, IntMatrix::new(al, b, ga, d)));
            }
        }
        let m = best.expect("candidates").1;
        debug_assert_eq!(m.det(), 1);
        m
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "∞")
        } else if self.gamma == 1 {
            write!(f, "{}", self.alpha)
        } else {
            write!(f, "{}/{}", self.alpha, self.gamma)
        }
    }
}

/// A cusp of Γ_0(N) with its width, parameter and scaling matrix.
///
/// `scaling` satisfies `scaling·∞ = cusp`; its bottom row (γ, δ) is what
/// [`epsilon_g`] reads as (γ, −α).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CuspDatum {
    pub cusp: Cusp,
    pub width: i64,
    pub kappa: Q,
    pub scaling: IntMatrix,
}

impl CuspDatum {
    /// The same cusp under the eta multiplier, κ = t/24 mod 1.
    pub fn with_eta_multiplier(mut self) -> Self {
        let k = Q::new(self.width, 24);
        self.kappa = k - k.floor();
        self
    }
}

/// Index of Γ_0(N) in SL₂(ℤ).
pub fn gamma0_index(n: i64) -> i64 {
    let mut idx = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            idx = idx / p * (p + 1);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        idx = idx / m * (m + 1);
    }
    idx
}

/// Inequivalent cusps of Γ_0(N), ∞ first, then by increasing γ.
pub fn cusps_of_gamma0(n: i64) -> Vec<CuspDatum> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let datum = |cusp: Cusp, width: i64| CuspDatum {
        cusp,
        width,
        kappa: Q::from(0),
        scaling: cusp.scaling_matrix(),
    };
    out.push(datum(Cusp::INFINITY, 1));
    for gamma in divisors(n as u64).into_iter().map(|g| g as i64).filter(|&g| g < n) {
        let m = gamma.gcd(&(n / gamma));
        let width = n / (gamma * gamma).gcd(&n);
        for r in 0..m.max(1) {
            if r.gcd(&m) != 1 && m > 1 {
                continue;
            }
            let alpha = (0..)
                .map(|k| r + k * m.max(1))
                .find(|a| a.gcd(&gamma) == 1)
                .expect("Dirichlet");
            out.push(datum(Cusp { alpha, gamma }, width));
        }
    }
    out
}

/// Width of the cusp α/γ on Γ_0(N).
pub fn cusp_width(n: i64, cusp: Cusp) -> i64 {
    if cusp.is_infinity() {
        return 1;
    }
    let g = cusp.gamma.gcd(&n);
    n / (g * g).gcd(&n)
}

/// Witness (M, r) with M ∈ Γ_0(N) and L₁ = M⁻¹·L₂·T^r, if c₁ ~ c₂.
pub fn cusp_equivalent(n: i64, c1: Cusp, c2: Cusp) -> Option<(IntMatrix, i64)> {
    let l1 = c1.scaling_matrix();
    let l2 = c2.scaling_matrix();
    let l1inv = l1.inverse();
    (0..n).find_map(|r| {
        let m = l2.mul(&IntMatrix::t(r)).mul(&l1inv);
        if m.in_gamma0(n) {
            debug_assert_eq!(m.inverse().mul(&l2).mul(&IntMatrix::t(r)), l1);
            Some((m, r))
        } else {
            None
        }
    })
}

/// An Atkin–Lehner representative [[a·e, b], [c·N, d·e]] of determinant e.
pub fn atkin_lehner_matrix(n: i64, e: i64) -> Result<IntMatrix, SymbolError> {
    if !is_exact_divisor(e as u64, n as u64) {
        return Err(SymbolError::NotExactDivisor { e: e as u64, m: n as u64 });
    }
    if e == 1 {
        return Ok(IntMatrix::IDENTITY);
    }
    if e == n {
        return Ok(IntMatrix::new(0, -1, n, 0));
    }
    // a·d·e − b·c·(N/e) = 1 with c = d = 1
    let m = n / e;
    let a = (1..m).find(|a| (a * e) % m == 1).expect("e is a unit mod N/e");
    let b = (a * e - 1) / m;
    IntMatrix::with_det(a * e, b, n, e, e)
}

/// A cusp of Γ_0(Nh) at which T_g has a pole, with everything the
/// coefficient formulas need.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoleCusp {
    pub datum: CuspDatum,
    pub pole: CuspPole,
}

impl PoleCusp {
    /// m·μ·t, the pole order of T_g^(−m)|L in the local parameter q^(1/t).
    pub fn local_order(&self, m: i64) -> i64 {
        let v = self.pole.pole_order * self.datum.width * m;
        assert!(v.is_integer(), "pole order times width must be integral");
        v.to_integer()
    }
}

/// The cusps of Γ_0(Nh) where T_g has a pole.
pub fn pole_cusps(sym: &GroupSymbol) -> Vec<PoleCusp> {
    cusps_of_gamma0(sym.level() as i64)
        .into_iter()
        .filter_map(|datum| epsilon_g(sym, &datum.scaling).map(|pole| PoleCusp { datum, pole }))
        .collect()
}
