//! Intersection numbers along a flipping curve `C` in a special-fiber
//! component, the K-degree of its strict transform after a standard blowup,
//! the sweep ruling out interior meetings, and a termination simulator.
//!
//! Chain positions follow [`crate::cyclic_quotient`]: for an ordinary point
//! position 1 is adjacent to `C`. The point where `C` meets the boundary
//! curve `D` is numbered from the `D` side instead, so it is stored as
//! `1/r1(a1, 1)` with `D` meeting position 1.

mod exclusion;
mod simulator;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cyclic_quotient::{
    boundary_discrepancies, contract_chain, gorenstein_index, is_corollary43_type,
    log_discrepancy_at_meeting, normalize, pullback_coefficient, CyclicQuotientType, FamilyParams,
};
use crate::error::{Error, Result};
use crate::numbers::{mod_inverse, HJChain, Rat};

pub use exclusion::{exclusion_sweep, ExclusionReport, ExclusionRow, RowVerdict};
pub use simulator::{
    default_max_steps, monte_carlo, monte_carlo_serial, random_state, run_sequence, EndReason,
    FlipState, Measure, Move, RandomStateParams, RunOutcome, RunSummary, Step, TrackedPoint,
};

/// Position of `C` relative to the special fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurveCase {
    /// `C` lies on two components.
    DoubleCurve,
    /// one component, `C` meets the boundary `D`
    MeetsBoundary,
    /// one component, `C` misses the boundary
    AwayFromBoundary,
}

impl CurveCase {
    pub fn number(self) -> u8 {
        match self {
            CurveCase::DoubleCurve => 1,
            CurveCase::MeetsBoundary => 2,
            CurveCase::AwayFromBoundary => 3,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(CurveCase::DoubleCurve),
            2 => Ok(CurveCase::MeetsBoundary),
            3 => Ok(CurveCase::AwayFromBoundary),
            _ => Err(Error::InvalidConfig(format!(
                "case must be 1, 2 or 3, got {n}"
            ))),
        }
    }
}

impl fmt::Display for CurveCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointOnCurve {
    pub germ: CyclicQuotientType,
    /// Chain position met by the strict transform of `C`; 0 for a smooth point.
    pub meet: usize,
    pub family: Option<FamilyParams>,
}

impl PointOnCurve {
    /// A smooth germ accepts `meet` 0 or 1 and stores 0.
    pub fn new(germ: CyclicQuotientType, meet: usize) -> Result<Self> {
        let len = germ.chain_len();
        let meet = if germ.is_smooth() {
            if meet > 1 {
                return Err(Error::PositionOutOfRange {
                    position: meet,
                    len: 0,
                });
            }
            0
        } else {
            if meet == 0 || meet > len {
                return Err(Error::PositionOutOfRange {
                    position: meet,
                    len,
                });
            }
            meet
        };
        let family = is_corollary43_type(&germ);
        Ok(PointOnCurve { germ, meet, family })
    }

    pub fn smooth() -> Self {
        PointOnCurve {
            germ: CyclicQuotientType::smooth(),
            meet: 0,
            family: None,
        }
    }

    /// `1/hr^2(bhr - 1, 1)` met at position 1.
    pub fn family(params: &FamilyParams) -> Self {
        PointOnCurve {
            germ: params.germ(),
            meet: 1,
            family: Some(params.clone()),
        }
    }

    /// Boundary point `1/r(a, 1)` (D-side numbering) met at the far end.
    pub fn boundary_end(r: impl Into<BigInt>, a: impl Into<BigInt>) -> Result<Self> {
        let germ = CyclicQuotientType::new(r, a)?;
        let len = germ.chain_len();
        Self::new(germ, len)
    }

    pub fn is_smooth(&self) -> bool {
        self.germ.is_smooth()
    }

    fn is_chain_end(&self) -> bool {
        self.meet <= 1 || self.meet == self.germ.chain_len()
    }

    fn is_index_one(&self) -> bool {
        self.is_smooth() || self.germ.is_rdp()
    }
}

impl fmt::Display for PointOnCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.germ, self.meet)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveConfig {
    case: CurveCase,
    points: Vec<PointOnCurve>,
    boundary: Option<PointOnCurve>,
}

impl CurveConfig {
    /// `boundary` is required in case 2 and forbidden otherwise. A
    /// configuration whose points all have index 1 is rejected: such a curve
    /// is never a flipping curve.
    pub fn new(
        case: CurveCase,
        points: Vec<PointOnCurve>,
        boundary: Option<PointOnCurve>,
    ) -> Result<Self> {
        match (case, &boundary) {
            (CurveCase::MeetsBoundary, None) => {
                return Err(Error::InvalidConfig("case 2 needs a boundary point".into()))
            }
            (CurveCase::DoubleCurve | CurveCase::AwayFromBoundary, Some(_)) => {
                return Err(Error::InvalidConfig(format!(
                    "case {case} has no boundary point"
                )))
            }
            _ => {}
        }
        let max_points = if case == CurveCase::MeetsBoundary {
            1
        } else {
            2
        };
        if points.len() > max_points {
            return Err(Error::InvalidConfig(format!(
                "case {case} allows at most {max_points} points besides the boundary, got {}",
                points.len()
            )));
        }
        let cfg = CurveConfig {
            case,
            points,
            boundary,
        };
        if cfg.max_index() <= BigInt::one() {
            return Err(Error::IndexOneFlip);
        }
        Ok(cfg)
    }

    pub fn double_curve(points: Vec<PointOnCurve>) -> Result<Self> {
        Self::new(CurveCase::DoubleCurve, points, None)
    }

    pub fn case(&self) -> CurveCase {
        self.case
    }

    pub fn points(&self) -> &[PointOnCurve] {
        &self.points
    }

    pub fn boundary(&self) -> Option<&PointOnCurve> {
        self.boundary.as_ref()
    }

    /// Index of `K` at each point: `r` for a point on `D` or on the double
    /// curve of case 1, the Gorenstein index of the surface germ otherwise.
    fn max_index(&self) -> BigInt {
        let on_double = |p: &PointOnCurve| p.germ.n().clone();
        let off = |p: &PointOnCurve| gorenstein_index(&p.germ);
        let mut m = BigInt::one();
        for p in &self.points {
            let i = if self.case == CurveCase::DoubleCurve {
                on_double(p)
            } else {
                off(p)
            };
            m = m.max(i);
        }
        if let Some(b) = &self.boundary {
            m = m.max(on_double(b));
        }
        m
    }
}

fn require_surface_case(cfg: &CurveConfig) -> Result<()> {
    if cfg.case == CurveCase::DoubleCurve {
        Err(Error::WrongCase("1".into()))
    } else {
        Ok(())
    }
}

/// `(C^2)` on the component: `-1 + sum` of pullback coefficients at the
/// meetings.
pub fn curve_self_intersection(cfg: &CurveConfig) -> Result<Rat> {
    require_surface_case(cfg)?;
    let mut c2 = Rat::from_int(-1);
    for p in cfg.boundary.iter().chain(&cfg.points) {
        c2 += pullback_coefficient(&p.germ, p.meet)?;
    }
    Ok(c2)
}

/// Contribution of the boundary point to `((K + D).C)`: a smooth point adds
/// `D.C = 1`, a singular one minus its log discrepancy at the meeting.
fn boundary_term(b: &PointOnCurve) -> Result<Rat> {
    if b.is_smooth() {
        return Ok(Rat::one());
    }
    let a = boundary_discrepancies(&b.germ, &[1])?;
    Ok(-&a[b.meet - 1])
}

/// `(K.C)`, or `((K + D).C)` in case 2: `-1 - sum` of discrepancies at the
/// meetings.
pub fn k_dot_c(cfg: &CurveConfig) -> Result<Rat> {
    require_surface_case(cfg)?;
    let mut k = Rat::from_int(-1);
    if let Some(b) = &cfg.boundary {
        k += boundary_term(b)?;
    }
    for p in &cfg.points {
        k -= log_discrepancy_at_meeting(&p.germ, p.meet)?;
    }
    Ok(k)
}

/// Arithmetic data of a two-point configuration meeting at chain ends.
/// An absent or smooth companion counts as `(r2, b2) = (1, 1)`; a smooth
/// boundary point as `(r1, b1) = (1, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveWitness {
    pub r1: BigInt,
    pub b1: BigInt,
    pub a1: BigInt,
    pub c1: BigInt,
    pub r2: BigInt,
    pub b2: BigInt,
    pub h2: BigInt,
    pub e: BigInt,
}

impl CurveWitness {
    fn from_pairs(r1: BigInt, b1: BigInt, r2: BigInt, b2: BigInt, h2: BigInt) -> Result<Self> {
        let (a1, c1) = if r1.is_one() {
            (BigInt::one(), BigInt::zero())
        } else {
            let a1 = mod_inverse(&b1, &r1)?;
            let c1 = (&a1 * &b1 - 1) / &r1;
            (a1, c1)
        };
        let e = &b1 * &r2 + &b2 * &r1 - &r1 * &r2;
        Ok(CurveWitness {
            r1,
            b1,
            a1,
            c1,
            r2,
            b2,
            h2,
            e,
        })
    }

    /// `1/(a1 r1) - e/(r1 r2)`
    pub fn closed_form_post(&self) -> Rat {
        Rat::new(1, &self.a1 * &self.r1) - Rat::new(self.e.clone(), &self.r1 * &self.r2)
    }
}

/// `(r, b, h)` of an ordinary point met at position 1.
fn companion_data(p: Option<&PointOnCurve>) -> Option<(BigInt, BigInt, BigInt)> {
    match p {
        None => Some((BigInt::one(), BigInt::one(), BigInt::one())),
        Some(p) if p.is_smooth() => Some((BigInt::one(), BigInt::one(), BigInt::one())),
        Some(p) if p.meet == 1 => p
            .family
            .as_ref()
            .map(|f| (f.r.clone(), f.b.clone(), f.h.clone())),
        Some(_) => None,
    }
}

/// Chooses the point that gets blown up in case 3: the largest index,
/// preferring `h = 1` among ties.
fn default_p1(cfg: &CurveConfig) -> Result<usize> {
    let key = |p: &PointOnCurve| {
        let r = p
            .family
            .as_ref()
            .map_or_else(|| gorenstein_index(&p.germ), |f| f.r.clone());
        let h_is_one = p.family.as_ref().is_some_and(|f| f.h.is_one());
        (r, h_is_one)
    };
    (0..cfg.points.len())
        .max_by(|&i, &j| {
            key(&cfg.points[i])
                .cmp(&key(&cfg.points[j]))
                .then(j.cmp(&i))
        })
        .ok_or_else(|| Error::InvalidConfig("no point on the curve".into()))
}

fn witness_at(cfg: &CurveConfig, p1: Option<usize>) -> Result<CurveWitness> {
    let not_end =
        || Error::InvalidConfig("points do not meet C at chain ends of family type".into());
    match cfg.case {
        CurveCase::DoubleCurve => Err(Error::WrongCase("1".into())),
        CurveCase::MeetsBoundary => {
            let b = cfg.boundary.as_ref().expect("validated");
            // D.C = 1 at a smooth boundary point, i.e. b1/r1 = 0
            let (r1, b1) = if b.is_smooth() {
                (BigInt::one(), BigInt::zero())
            } else if b.meet == b.germ.chain_len() {
                (b.germ.n().clone(), mod_inverse(b.germ.q(), b.germ.n())?)
            } else {
                return Err(not_end());
            };
            let (r2, b2, h2) = companion_data(cfg.points.first()).ok_or_else(not_end)?;
            CurveWitness::from_pairs(r1, b1, r2, b2, h2)
        }
        CurveCase::AwayFromBoundary => {
            let i1 = match p1 {
                Some(i) => i,
                None => default_p1(cfg)?,
            };
            let (r1, b1, h1) = companion_data(cfg.points.get(i1)).ok_or_else(not_end)?;
            if !h1.is_one() {
                return Err(Error::NotSimpleType(h1.to_string()));
            }
            let other = cfg
                .points
                .iter()
                .enumerate()
                .find(|(i, _)| *i != i1)
                .map(|(_, p)| p);
            let (r2, b2, h2) = companion_data(other).ok_or_else(not_end)?;
            CurveWitness::from_pairs(r1, b1, r2, b2, h2)
        }
    }
}

/// Witness data for the blown-up point `P1` (the boundary point in case 2,
/// the largest index in case 3).
pub fn curve_witness(cfg: &CurveConfig) -> Result<CurveWitness> {
    witness_at(cfg, None)
}

/// `e = b1 r2 + b2 r1 - r1 r2`, positive exactly when `C` is K-negative.
pub fn excess_e(cfg: &CurveConfig) -> Result<BigInt> {
    let w = curve_witness(cfg)?;
    if w.e.is_positive() {
        Ok(w.e)
    } else {
        Err(Error::NotFlipping(format!("e = {} is not positive", w.e)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `(K'.C') < 0`: contract `C'` next.
    Flip,
    /// `(K'.C') = 0`: flop `C'`.
    Flop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Route {
    /// `C'` is a (-1,-1)-curve.
    DoubleCurve,
    /// `C'` passes through the new point `1/a1(c1, 1)` on `E1`.
    NewGerm,
    /// `E1` is the first curve of the boundary chain; the rest contracts.
    Subchain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PostBlowup {
    pub k_dot_c: Rat,
    /// Germ at `E1 ∩ C'`, listed from `C'`; smooth when `C'` meets `E1`
    /// transversally at a smooth point.
    pub new_germ: CyclicQuotientType,
    pub branch: Branch,
    pub route: Route,
}

impl PostBlowup {
    fn new(value: Rat, new_germ: CyclicQuotientType, route: Route) -> Result<Self> {
        if value.is_positive() {
            return Err(Error::invariant(format!(
                "K-degree {value} of C' after the standard blowup is positive"
            )));
        }
        let branch = if value.is_zero() {
            Branch::Flop
        } else {
            Branch::Flip
        };
        Ok(PostBlowup {
            k_dot_c: value,
            new_germ,
            branch,
            route,
        })
    }
}

/// `(K'.C')` after the standard blowup of the largest-index point on a
/// flipping curve. Case 1 is a flop outright.
pub fn post_blowup_k_dot_c(cfg: &CurveConfig) -> Result<PostBlowup> {
    post_blowup_at(cfg, None)
}

/// As [`post_blowup_k_dot_c`] with the blown-up point fixed (case 3 only).
pub(crate) fn post_blowup_at(cfg: &CurveConfig, p1: Option<usize>) -> Result<PostBlowup> {
    if cfg.case == CurveCase::DoubleCurve {
        return PostBlowup::new(
            Rat::zero(),
            CyclicQuotientType::smooth(),
            Route::DoubleCurve,
        );
    }
    if cfg.case == CurveCase::AwayFromBoundary && cfg.points.iter().any(|p| !p.is_chain_end()) {
        return Err(Error::ExcludedSubcase);
    }
    let k = k_dot_c(cfg)?;
    if !k.is_negative() {
        return Err(Error::NotFlipping(format!("(K.C) = {k}")));
    }
    match cfg.case {
        CurveCase::MeetsBoundary => post_boundary_case(cfg),
        _ => post_interior_case(cfg, p1),
    }
}

fn others_term(others: &[&PointOnCurve]) -> Result<Rat> {
    let mut s = Rat::zero();
    for o in others {
        s += log_discrepancy_at_meeting(&o.germ, o.meet)?;
    }
    Ok(s)
}

/// `-1 - logdisc(new germ) - sum(others)` where the new germ `1/a1(1, -r1)`
/// is met by `C'` at position 1 and by `E1` at the far end.
fn new_germ_route(
    r1: &BigInt,
    a1: &BigInt,
    others: &[&PointOnCurve],
) -> Result<(Rat, CyclicQuotientType)> {
    let germ = normalize(a1.clone(), 1, -r1)?;
    let mut v = Rat::from_int(-1);
    if germ.is_smooth() {
        v += Rat::one();
    } else {
        let a = boundary_discrepancies(&germ, &[germ.chain_len()])?;
        v -= &a[0];
    }
    v -= others_term(others)?;
    Ok((v, germ))
}

fn check_closed_form(cfg: &CurveConfig, p1: Option<usize>, value: &Rat) -> Result<()> {
    if let Ok(w) = witness_at(cfg, p1) {
        let cf = w.closed_form_post();
        if &cf != value {
            return Err(Error::invariant(format!(
                "closed form {cf} disagrees with the solver value {value}"
            )));
        }
    }
    Ok(())
}

fn post_interior_case(cfg: &CurveConfig, p1: Option<usize>) -> Result<PostBlowup> {
    let i1 = match p1 {
        Some(i) => i,
        None => default_p1(cfg)?,
    };
    let p = cfg
        .points
        .get(i1)
        .ok_or_else(|| Error::InvalidConfig(format!("no point {i1} on the curve")))?;
    let fam = match (&p.family, p.meet) {
        (Some(f), 1) => f,
        _ => {
            return Err(Error::InvalidConfig(format!(
                "{} is not a point 1/hr^2(bhr-1,1) met at position 1",
                p
            )))
        }
    };
    if !fam.h.is_one() {
        return Err(Error::NotSimpleType(fam.h.to_string()));
    }
    let a1 = mod_inverse(&fam.b, &fam.r)?;
    let others: Vec<&PointOnCurve> = cfg
        .points
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != i1)
        .map(|(_, o)| o)
        .collect();
    let (value, germ) = new_germ_route(&fam.r, &a1, &others)?;
    check_closed_form(cfg, Some(i1), &value)?;
    PostBlowup::new(value, germ, Route::NewGerm)
}

fn post_boundary_case(cfg: &CurveConfig) -> Result<PostBlowup> {
    let b = cfg.boundary.as_ref().expect("validated");
    if b.is_smooth() {
        return Err(Error::InvalidConfig("boundary point of index 1".into()));
    }
    let other = cfg.points.first();
    let companion_index_one = other.is_none_or(PointOnCurve::is_index_one);
    let at_end = b.meet == b.germ.chain_len();
    let companion_is_family =
        other.is_none_or(|o| o.is_smooth() || (o.family.is_some() && o.meet == 1));

    if at_end && companion_is_family {
        let others: Vec<&PointOnCurve> = other.into_iter().collect();
        let (value, germ) = new_germ_route(b.germ.n(), b.germ.q(), &others)?;
        check_closed_form(cfg, None, &value)?;
        return PostBlowup::new(value, germ, Route::NewGerm);
    }
    if !companion_index_one {
        return Err(Error::InvalidConfig(
            "an interior boundary meeting needs an index-one companion".into(),
        ));
    }
    let others: Vec<&PointOnCurve> = other.into_iter().collect();
    let (value, germ) = subchain_route(b, &others)?;
    // equality holds exactly when C meets the curve that becomes E1
    if value.is_zero() != (b.meet == 1) {
        return Err(Error::invariant(format!(
            "K-degree {value} after blowup with meeting at position {}",
            b.meet
        )));
    }
    PostBlowup::new(value, germ, Route::Subchain)
}

/// `E1` is the image of the first boundary-chain curve; `C'` meets `E1`
/// directly when `j0 = 1`, otherwise through the contraction of the rest.
fn subchain_route(b: &PointOnCurve, others: &[&PointOnCurve]) -> Result<(Rat, CyclicQuotientType)> {
    let entries = b.germ.chain().expect("singular boundary point");
    let j0 = b.meet;
    let rest = others_term(others)?;
    if j0 == 1 {
        return Ok((-rest, CyclicQuotientType::smooth()));
    }
    let sub = HJChain::new(entries.entries()[1..].to_vec())?;
    let germ = contract_chain(&sub);
    let a = boundary_discrepancies(&germ, &[1])?;
    Ok((Rat::from_int(-1) - &a[j0 - 2] - rest, germ))
}

/// `r2 ≡ a1 e (mod r1)` and `r2 <= a1 e`.
pub fn congruence_witness_holds(w: &CurveWitness) -> bool {
    let a1e = &w.a1 * &w.e;
    (&w.r2 - &a1e).mod_floor(&w.r1).is_zero() && w.r2 <= a1e
}
