//! Terminal threefold germs `xy + G(z^r) = 0` in the `mu_r`-quotient of
//! `Spec A[x, y, z]`, with `mu_r` acting by weights `(a, -a, 1)`.
//!
//! `G = sum_k g_k z^{rk}` is kept only up to what the geometry reads off it:
//! the tau-adic valuation of each nonzero coefficient. Each stored `g_k` is a
//! unit times `tau^val`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cyclic_quotient::CyclicQuotientType;
use crate::error::{Error, Result};
use crate::numbers::{int, mod_inverse, Rat};

/// `G(z^r)` as `k -> val(g_k)`; absent `k` means `g_k = 0`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GermSeries {
    terms: BTreeMap<u32, u32>,
}

impl GermSeries {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (k, val) in pairs {
            if terms.insert(k, val).is_some() {
                return Err(Error::InvalidPoint(format!("term z^(r*{k}) listed twice")));
            }
        }
        Ok(GermSeries { terms })
    }

    /// `(k, val)` pairs in increasing `k`.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn valuation(&self, k: u32) -> Option<u32> {
        self.terms.get(&k).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exponents `k >= 1` surviving modulo tau, i.e. the monomials of `G_s`.
    pub fn special_fiber_terms(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms
            .iter()
            .filter(|(&k, &v)| k >= 1 && v == 0)
            .map(|(&k, _)| k)
    }
}

impl fmt::Display for GermSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (k, v)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({k},{v})")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for GermSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TerminalPoint {
    r: BigInt,
    a: BigInt,
    g: GermSeries,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleType {
    pub is_simple: bool,
    /// Lowest power of `z^r` in `G_s`; `None` when `G_s = 0`.
    pub h: Option<u32>,
}

impl TerminalPoint {
    pub fn new(r: impl Into<BigInt>, a: impl Into<BigInt>, g: GermSeries) -> Result<Self> {
        let (r, a) = (r.into(), a.into());
        if r < int(2) {
            return Err(Error::InvalidPoint(format!(
                "index r must be at least 2, got {r}"
            )));
        }
        if !a.is_positive() || a >= r {
            return Err(Error::InvalidPoint(format!(
                "need 0 < a < r, got a = {a}, r = {r}"
            )));
        }
        if !r.gcd(&a).is_one() {
            return Err(Error::InvalidPoint(format!(
                "gcd(r,a) must be 1, got r = {r}, a = {a}"
            )));
        }
        if g.valuation(0).is_none() && g.special_fiber_terms().next().is_none() {
            return Err(Error::InvalidPoint(
                "G has no constant term and no unit coefficient".into(),
            ));
        }
        let p = TerminalPoint { r, a, g };
        debug_assert!(p.is_mu_r_invariant());
        Ok(p)
    }

    /// `G = tau^n + z^r`: simple type with `h = 1`, axial multiplicity `n`.
    pub fn simple(r: impl Into<BigInt>, a: impl Into<BigInt>, n: u32) -> Result<Self> {
        Self::new(r, a, GermSeries::from_pairs([(0, n), (1, 0)])?)
    }

    /// `G = tau^n + tau z^r`: `G_s = 0`, so the point lies on a double curve
    /// of the special fiber.
    pub fn on_double_curve(r: impl Into<BigInt>, a: impl Into<BigInt>, n: u32) -> Result<Self> {
        Self::new(r, a, GermSeries::from_pairs([(0, n), (1, 1)])?)
    }

    /// `F = xy + tau`.
    pub fn non_integral(r: impl Into<BigInt>, a: impl Into<BigInt>) -> Result<Self> {
        Self::new(r, a, GermSeries::from_pairs([(0, 1)])?)
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn g(&self) -> &GermSeries {
        &self.g
    }

    pub fn index(&self) -> BigInt {
        self.r.clone()
    }

    /// Integer `mu_r` weights of `(x, y, z)`.
    pub fn mu_r_weights(&self) -> (BigInt, BigInt, BigInt) {
        (self.a.clone(), (-&self.a).mod_floor(&self.r), BigInt::one())
    }

    fn is_mu_r_invariant(&self) -> bool {
        let (wx, wy, wz) = self.mu_r_weights();
        // xy and z^r are invariant
        ((&wx + &wy) % &self.r).is_zero() && ((&wz * &self.r) % &self.r).is_zero()
    }

    /// Largest `n` with `G mod z^r` in `tau^n A`.
    pub fn axial_multiplicity(&self) -> Result<u32> {
        self.g.valuation(0).ok_or(Error::InfiniteAxialMultiplicity)
    }

    pub fn simple_type(&self) -> SimpleType {
        let h = self.g.special_fiber_terms().next();
        SimpleType {
            is_simple: h.is_none_or(|h| h == 1),
            h,
        }
    }

    /// Weights `(1/r)(a, r - a, 1, r)` of `(x, y, z, tau)`.
    pub fn blowup_weights(&self) -> [Rat; 4] {
        [
            Rat::new(self.a.clone(), self.r.clone()),
            Rat::new(&self.r - &self.a, self.r.clone()),
            Rat::new(1, self.r.clone()),
            Rat::one(),
        ]
    }

    /// Weight of `F`: the minimum over its monomials, `xy` weighing 1 and
    /// `tau^v z^{rk}` weighing `v + k`.
    pub fn f_weight(&self) -> Rat {
        let min_g = self
            .g
            .terms()
            .map(|(k, v)| u64::from(k) + u64::from(v))
            .min();
        match min_g {
            Some(m) if m < 1 => Rat::from_int(i64::try_from(m).expect("small")),
            _ => Rat::one(),
        }
    }
}

impl fmt::Display for TerminalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(r={},a={},g={})", self.r, self.a, self.g)
    }
}

impl fmt::Debug for TerminalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AdeKind {
    A(u32),
    D(u32),
    E(u32),
}

impl fmt::Display for AdeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdeKind::A(n) => write!(f, "A{n}"),
            AdeKind::D(n) => write!(f, "D{n}"),
            AdeKind::E(n) => write!(f, "E{n}"),
        }
    }
}

/// Index-one points of a semistable terminal threefold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Index1Point {
    /// `F = xyz + tau`
    XyzTau,
    /// `F = xy + tau`
    XyTau,
    /// special fiber has a rational double point
    Rdp(AdeKind),
}

impl Index1Point {
    pub fn index(&self) -> BigInt {
        BigInt::one()
    }
}

impl fmt::Display for Index1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index1Point::XyzTau => write!(f, "xyz+tau"),
            Index1Point::XyTau => write!(f, "xy+tau"),
            Index1Point::Rdp(kind) => write!(f, "{kind}"),
        }
    }
}

pub fn classify_index1(label: &str) -> Result<Index1Point> {
    let unknown = || Error::UnknownLabel(label.to_string());
    let compact: String = label.chars().filter(|c| !c.is_whitespace()).collect();
    match compact.to_ascii_lowercase().as_str() {
        "xyz+tau" => return Ok(Index1Point::XyzTau),
        "xy+tau" => return Ok(Index1Point::XyTau),
        _ => {}
    }
    let mut chars = compact.chars();
    let family = chars.next().ok_or_else(unknown)?;
    let rank: u32 = chars.as_str().parse().map_err(|_| unknown())?;
    let kind = match family {
        'A' if rank >= 1 => AdeKind::A(rank),
        'D' if rank >= 4 => AdeKind::D(rank),
        'E' if (6..=8).contains(&rank) => AdeKind::E(rank),
        _ => return Err(unknown()),
    };
    Ok(Index1Point::Rdp(kind))
}

/// Discrepancy of the exceptional divisor of a weighted blowup of a
/// hypersurface germ in 4-space: `sum(weights) - weight(F) - 1`.
pub fn blowup_discrepancy(weights: &[Rat], f_weight: &Rat) -> Result<Rat> {
    if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
        return Err(Error::InvalidPoint(format!(
            "blowup weight {w} is not positive"
        )));
    }
    let d = weights.iter().sum::<Rat>() - f_weight - Rat::one();
    if d.is_positive() {
        Ok(d)
    } else {
        Err(Error::NonTerminal(d.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chart {
    X,
    Y,
    Tau,
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Chart::X => "x",
            Chart::Y => "y",
            Chart::Tau => "tau",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupChild {
    pub chart: Chart,
    pub point: TerminalPoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupResult {
    pub discrepancy: Rat,
    pub children: Vec<BlowupChild>,
}

/// Weighted blowup with weights `(1/r)(a, r - a, 1, r)`.
///
/// The x- and y-chart origins are quotients `1/a(-r, 1, r)` and
/// `1/(r-a)(-a, 1, a)` of `xy + tau`; the tau-chart origin keeps `(r, a)`
/// and replaces `val(g_k)` by `val(g_k) + k - 1`.
pub fn standard_blowup(p: &TerminalPoint) -> Result<BlowupResult> {
    let st = p.simple_type();
    if !st.is_simple {
        return Err(Error::NotSimpleType(
            st.h.map_or_else(|| "none".to_string(), |h| h.to_string()),
        ));
    }
    let discrepancy = blowup_discrepancy(&p.blowup_weights(), &p.f_weight())?;
    let n = p.axial_multiplicity()?;
    let (r, a) = (&p.r, &p.a);
    let b = r - a;

    let mut children = Vec::with_capacity(3);
    if a > &BigInt::one() {
        let weight = (-r).mod_floor(a);
        children.push(BlowupChild {
            chart: Chart::X,
            point: TerminalPoint::non_integral(a.clone(), weight)?,
        });
    }
    if b > BigInt::one() {
        let weight = (-a).mod_floor(&b);
        children.push(BlowupChild {
            chart: Chart::Y,
            point: TerminalPoint::non_integral(b.clone(), weight)?,
        });
    }
    if n > 1 {
        let g = GermSeries::from_pairs(p.g.terms().map(|(k, v)| (k, v + k - 1)))?;
        children.push(BlowupChild {
            chart: Chart::Tau,
            point: TerminalPoint::new(r.clone(), a.clone(), g)?,
        });
    }
    Ok(BlowupResult {
        discrepancy,
        children,
    })
}

/// Surface germ of a special-fiber component at `p`: `1/hr^2(bhr - 1, 1)`
/// off the double curve, `1/r(b, 1)` on it, where `ab = 1 mod r`.
pub fn surface_germ_types(p: &TerminalPoint, on_double_curve: bool) -> Result<CyclicQuotientType> {
    let b = mod_inverse(&p.a, &p.r)?;
    if on_double_curve {
        return CyclicQuotientType::new(p.r.clone(), b);
    }
    let h = BigInt::from(p.simple_type().h.ok_or(Error::NonNormalSpecialFiber)?);
    let n = &h * &p.r * &p.r;
    let q = &b * &h * &p.r - 1;
    CyclicQuotientType::new(n, q)
}
