//! Cyclic quotient surface germs `1/n(q, 1)` and their minimal resolutions.
//!
//! Discrepancies and pullback coefficients come from exact solves against the
//! chain intersection matrix. Chain positions are 1-based and follow the
//! order produced by [`hj_expand`], i.e. position 1 is the curve adjacent to
//! the outer curve (the strict transform of the curve through the point, or
//! of the boundary).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numbers::linalg::{self, Matrix};
use crate::numbers::{hj_evaluate, hj_expand, int, mod_inverse, HJChain, Rat};

/// The germ `1/n(q, 1)`. `n = 1, q = 0` is the smooth germ.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicQuotientType {
    n: BigInt,
    q: BigInt,
}

impl CyclicQuotientType {
    pub fn new(n: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (n, q) = (n.into(), q.into());
        if n.is_one() {
            if !q.is_zero() {
                return Err(Error::InvalidQuotient(format!(
                    "smooth germ must have q = 0, got q = {q}"
                )));
            }
            return Ok(Self::smooth());
        }
        if n < int(2) {
            return Err(Error::InvalidQuotient(format!(
                "n must be positive, got {n}"
            )));
        }
        if !q.is_positive() || q >= n {
            return Err(Error::InvalidQuotient(format!(
                "q must satisfy 0 < q < n, got n = {n}, q = {q}"
            )));
        }
        if !n.gcd(&q).is_one() {
            return Err(Error::InvalidQuotient(format!(
                "gcd(n,q) must be 1, got n = {n}, q = {q}"
            )));
        }
        Ok(CyclicQuotientType { n, q })
    }

    pub fn smooth() -> Self {
        CyclicQuotientType {
            n: BigInt::one(),
            q: BigInt::zero(),
        }
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn is_smooth(&self) -> bool {
        self.n.is_one()
    }

    /// `1/n(n-1, 1)`, the A_{n-1} rational double point.
    pub fn is_rdp(&self) -> bool {
        !self.is_smooth() && self.q == &self.n - 1
    }

    /// Minimal resolution chain, `None` for the smooth germ.
    pub fn chain(&self) -> Option<HJChain> {
        if self.is_smooth() {
            None
        } else {
            Some(hj_expand(&self.n, &self.q).expect("validated germ"))
        }
    }

    pub fn chain_len(&self) -> usize {
        self.chain().map_or(0, |c| c.len())
    }
}

impl fmt::Display for CyclicQuotientType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}({},1)", self.n, self.q)
    }
}

impl fmt::Debug for CyclicQuotientType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parameters `(h, r, b)` of a germ `1/hr^2(bhr - 1, 1)` with `0 < b < r`,
/// `gcd(r, b) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilyParams {
    pub h: BigInt,
    pub r: BigInt,
    pub b: BigInt,
}

impl FamilyParams {
    pub fn new(h: impl Into<BigInt>, r: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self> {
        let (h, r, b) = (h.into(), r.into(), b.into());
        if !h.is_positive() || r < int(2) || !b.is_positive() || b >= r || !r.gcd(&b).is_one() {
            return Err(Error::InvalidQuotient(format!(
                "(h, r, b) = ({h}, {r}, {b}) needs h >= 1, r >= 2, 0 < b < r, gcd(r, b) = 1"
            )));
        }
        Ok(FamilyParams { h, r, b })
    }

    pub fn germ(&self) -> CyclicQuotientType {
        let n = &self.h * &self.r * &self.r;
        let q = &self.b * &self.h * &self.r - 1;
        CyclicQuotientType::new(n, q).expect("family germ is valid")
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(h={},r={},b={})", self.h, self.r, self.b)
    }
}

/// Reduces `1/n(w1, w2)` to the faithful form `1/n'(q, 1)`.
///
/// The kernel `gcd(n, w1, w2)` is divided out, `w2` must then be invertible,
/// and reflections in the first coordinate (`gcd(n', q) > 1`) are quotiented
/// away.
pub fn normalize(
    n: impl Into<BigInt>,
    w1: impl Into<BigInt>,
    w2: impl Into<BigInt>,
) -> Result<CyclicQuotientType> {
    let (n, w1, w2) = (n.into(), w1.into(), w2.into());
    if !n.is_positive() {
        return Err(Error::InvalidQuotient(format!(
            "group order must be positive, got {n}"
        )));
    }
    let kernel = n.gcd(&w1).gcd(&w2);
    let n = &n / &kernel;
    if n.is_one() {
        return Ok(CyclicQuotientType::smooth());
    }
    let w1 = (&w1 / &kernel).mod_floor(&n);
    let w2 = (&w2 / &kernel).mod_floor(&n);
    let inv = mod_inverse(&w2, &n).map_err(|_| {
        Error::InvalidQuotient(format!(
            "second weight {w2} is not invertible modulo {n} after removing the kernel"
        ))
    })?;
    let q = (&w1 * &inv).mod_floor(&n);
    let d = n.gcd(&q);
    let n = &n / &d;
    if n.is_one() {
        return Ok(CyclicQuotientType::smooth());
    }
    CyclicQuotientType::new(n, &q / &d)
}

/// Exceptional chain of the minimal resolution together with the
/// discrepancies `a_j` in `K_V = alpha^* K + sum a_j F_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionChain {
    pub germ: CyclicQuotientType,
    pub self_intersections: Option<HJChain>,
    pub discrepancies: Vec<Rat>,
}

impl ResolutionChain {
    pub fn len(&self) -> usize {
        self.discrepancies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.discrepancies.is_empty()
    }

    pub fn entries(&self) -> &[BigInt] {
        self.self_intersections
            .as_ref()
            .map_or(&[], |c| c.entries())
    }

    /// Coefficients `c_j` of the total transform of a curve meeting `F_{j0}`.
    pub fn pullback_of(&self, j0: usize) -> Result<Vec<Rat>> {
        check_position(j0, self.len())?;
        let mut rhs = vec![Rat::zero(); self.len()];
        rhs[j0 - 1] = Rat::from_int(-1);
        linalg::solve(&intersection_matrix(self.entries()), &rhs)
    }
}

fn check_position(j0: usize, len: usize) -> Result<()> {
    if j0 == 0 || j0 > len {
        Err(Error::PositionOutOfRange { position: j0, len })
    } else {
        Ok(())
    }
}

/// `(F_i . F_j)`: `-b_i` on the diagonal, 1 between neighbours.
pub fn intersection_matrix(entries: &[BigInt]) -> Matrix {
    let k = entries.len();
    let mut m = Matrix::zeros(k, k);
    for (i, b) in entries.iter().enumerate() {
        m.set(i, i, Rat::from_int(-b));
        if i + 1 < k {
            m.set(i, i + 1, Rat::one());
            m.set(i + 1, i, Rat::one());
        }
    }
    m
}

fn solve_adjunction(entries: &[BigInt], boundary: &[usize]) -> Result<Vec<Rat>> {
    let mut rhs: Vec<Rat> = entries.iter().map(|b| Rat::from_int(b - 2)).collect();
    for &p in boundary {
        check_position(p, entries.len())?;
        rhs[p - 1] += Rat::one();
    }
    linalg::solve(&intersection_matrix(entries), &rhs)
}

pub fn resolve(t: &CyclicQuotientType) -> Result<ResolutionChain> {
    let chain = t.chain();
    let discrepancies = match &chain {
        Some(c) => solve_adjunction(c.entries(), &[])?,
        None => Vec::new(),
    };
    Ok(ResolutionChain {
        germ: t.clone(),
        self_intersections: chain,
        discrepancies,
    })
}

/// Discrepancy `a_{j0}`; a smooth germ contributes 0.
pub fn log_discrepancy_at_meeting(t: &CyclicQuotientType, j0: usize) -> Result<Rat> {
    let Some(chain) = t.chain() else {
        return Ok(Rat::zero());
    };
    check_position(j0, chain.len())?;
    Ok(solve_adjunction(chain.entries(), &[])?.swap_remove(j0 - 1))
}

/// Discrepancies of `K + B` where `B` is a reduced boundary curve meeting the
/// chain transversally at each listed position.
pub fn boundary_discrepancies(t: &CyclicQuotientType, boundary: &[usize]) -> Result<Vec<Rat>> {
    match t.chain() {
        Some(chain) => solve_adjunction(chain.entries(), boundary),
        None if boundary.is_empty() => Ok(Vec::new()),
        None => Err(Error::PositionOutOfRange {
            position: boundary[0],
            len: 0,
        }),
    }
}

/// Coefficient at `F_{j0}` of the total transform of a curve meeting `F_{j0}`;
/// a smooth germ contributes 0.
pub fn pullback_coefficient(t: &CyclicQuotientType, j0: usize) -> Result<Rat> {
    let Some(chain) = t.chain() else {
        return Ok(Rat::zero());
    };
    check_position(j0, chain.len())?;
    let mut rhs = vec![Rat::zero(); chain.len()];
    rhs[j0 - 1] = Rat::from_int(-1);
    Ok(linalg::solve(&intersection_matrix(chain.entries()), &rhs)?.swap_remove(j0 - 1))
}

/// Least `m >= 1` with `mK` Cartier: `n / gcd(n, q + 1)`.
pub fn gorenstein_index(t: &CyclicQuotientType) -> BigInt {
    &t.n / t.n.gcd(&(&t.q + 1))
}

/// Recognizes `1/hr^2(bhr - 1, 1)`; the triple is unique when it exists.
pub fn is_corollary43_type(t: &CyclicQuotientType) -> Option<FamilyParams> {
    if t.is_smooth() {
        return None;
    }
    let q1: BigInt = &t.q + 1;
    let mut found = None;
    let mut r = int(2);
    while &r * &r <= t.n {
        let (h, rem) = t.n.div_rem(&(&r * &r));
        if rem.is_zero() {
            let hr = &h * &r;
            let (b, rem) = q1.div_rem(&hr);
            if rem.is_zero() {
                if let Ok(params) = FamilyParams::new(h, r.clone(), b) {
                    debug_assert!(found.is_none(), "family parameters are unique");
                    found = Some(params);
                }
            }
        }
        r += 1;
    }
    found
}

pub fn contract_chain(chain: &HJChain) -> CyclicQuotientType {
    let (n, q) = hj_evaluate(chain);
    CyclicQuotientType::new(n, q).expect("chain evaluates to a coprime pair")
}
