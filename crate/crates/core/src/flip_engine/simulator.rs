//! Termination simulator for sequences of flips.
//!
//! A state is a flipping curve through some tracked terminal points plus the
//! other singular points created so far. A FLIP step blows up the point of
//! largest index on the curve (ties: larger axial multiplicity, then older
//! id), replaces it by its chart children and looks at `(K'.C')`. When that
//! is negative the strict transform `C'` is the next flipping curve, as long
//! as the new point on `E1` is still the largest; otherwise, and after every
//! FLOP, the curve is re-anchored through the largest point.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numbers::Rat;
use crate::terminal3fold::{standard_blowup, surface_germ_types, Chart, TerminalPoint};

use super::{
    curve_self_intersection, k_dot_c, post_blowup_at, Branch, CurveCase, CurveConfig, PointOnCurve,
    Route,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackedPoint {
    pub id: u64,
    pub point: TerminalPoint,
}

impl TrackedPoint {
    pub fn r(&self) -> &BigInt {
        self.point.r()
    }

    pub fn n(&self) -> u32 {
        self.point
            .axial_multiplicity()
            .expect("tracked points have finite multiplicity")
    }

    fn on_double_curve(&self) -> bool {
        self.point.simple_type().h.is_none()
    }

    /// Greater means blown up first.
    fn priority(&self, other: &Self) -> Ordering {
        self.r()
            .cmp(other.r())
            .then(self.n().cmp(&other.n()))
            .then(other.id.cmp(&self.id))
    }
}

/// `(r_max, n_total)`, compared lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Measure {
    pub r_max: BigInt,
    pub n_total: u64,
}

impl Measure {
    /// Pairs are `(index, axial multiplicity)`; index-one points never
    /// contribute to `n_total`.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (BigInt, u64)>) -> Self {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let r_max = pairs
            .iter()
            .map(|(r, _)| r.clone())
            .max()
            .unwrap_or_else(BigInt::one);
        let r_max = r_max.max(BigInt::one());
        let n_total = if r_max.is_one() {
            0
        } else {
            pairs
                .iter()
                .filter(|(r, _)| *r == r_max)
                .map(|(_, n)| n)
                .sum()
        };
        Measure { r_max, n_total }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r_max, self.n_total)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Flip,
    Flop,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::Flip => "FLIP",
            Move::Flop => "FLOP",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub index: usize,
    pub kind: Move,
    /// `(r, n)` of the blown-up point; for a FLOP, of the flip it completes.
    pub acting: (BigInt, u32),
    pub measure: Measure,
    /// `(K.C)` before the step; `None` for a curve on two components.
    pub kc: Option<Rat>,
    pub kc_post: Rat,
    pub counter: u64,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kc = self
            .kc
            .as_ref()
            .map_or_else(|| "-".to_string(), ToString::to_string);
        write!(
            f,
            "{} {} point=({},{}) measure={} kc={} kc_post={} d={}",
            self.index,
            self.kind,
            self.acting.0,
            self.acting.1,
            self.measure,
            kc,
            self.kc_post,
            self.counter
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipState {
    case: CurveCase,
    /// In cases 1 and 2 the first point lies on the double curve.
    curve: Vec<TrackedPoint>,
    extra_points: Vec<TrackedPoint>,
    pending_flop: Option<(BigInt, u32)>,
    counter: u64,
    step_log: Vec<Step>,
    next_id: u64,
}

impl FlipState {
    /// Points on the curve. In case 1 there is one point and it lies on the
    /// double curve (`G_s = 0`); in case 2 the first point does and an
    /// optional second does not; in case 3 there are one or two points off
    /// the double curve. No points at all gives a state with `r_max = 1`.
    pub fn new(case: CurveCase, points: Vec<TerminalPoint>) -> Result<Self> {
        for p in &points {
            if p.axial_multiplicity()? == 0 {
                return Err(Error::InvalidPoint(format!("{p} has axial multiplicity 0")));
            }
        }
        let on_double: Vec<bool> = points.iter().map(|p| p.simple_type().h.is_none()).collect();
        let ok = match case {
            _ if points.is_empty() => true,
            CurveCase::DoubleCurve => on_double == [true],
            CurveCase::MeetsBoundary => {
                points.len() <= 2 && on_double[0] && on_double[1..].iter().all(|d| !d)
            }
            CurveCase::AwayFromBoundary => points.len() <= 2 && on_double.iter().all(|d| !d),
        };
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "case {case} does not allow these points (on the double curve: {on_double:?})"
            )));
        }
        let curve: Vec<TrackedPoint> = points
            .into_iter()
            .enumerate()
            .map(|(i, point)| TrackedPoint {
                id: i as u64,
                point,
            })
            .collect();
        Ok(FlipState {
            case,
            next_id: curve.len() as u64,
            curve,
            extra_points: Vec::new(),
            pending_flop: None,
            counter: 0,
            step_log: Vec::new(),
        })
    }

    pub fn case(&self) -> CurveCase {
        self.case
    }

    pub fn curve_points(&self) -> &[TrackedPoint] {
        &self.curve
    }

    pub fn extra_points(&self) -> &[TrackedPoint] {
        &self.extra_points
    }

    pub fn has_pending_flop(&self) -> bool {
        self.pending_flop.is_some()
    }

    pub fn discrepancy_counter(&self) -> u64 {
        self.counter
    }

    pub fn step_log(&self) -> &[Step] {
        &self.step_log
    }

    fn all_points(&self) -> impl Iterator<Item = &TrackedPoint> {
        self.curve.iter().chain(&self.extra_points)
    }

    pub fn measure(&self) -> Measure {
        Measure::from_pairs(self.all_points().map(|p| (p.r().clone(), u64::from(p.n()))))
    }

    fn global_max(&self) -> Option<&TrackedPoint> {
        self.all_points().max_by(|a, b| a.priority(b))
    }

    /// Surface data of the current curve.
    pub fn curve_config(&self) -> Result<CurveConfig> {
        let boundary_germ = |p: &TrackedPoint| -> Result<PointOnCurve> {
            PointOnCurve::boundary_end(p.r().clone(), p.point.a().clone())
        };
        let off_curve = |p: &TrackedPoint| -> Result<PointOnCurve> {
            PointOnCurve::new(surface_germ_types(&p.point, false)?, 1)
        };
        match self.case {
            CurveCase::DoubleCurve => {
                let pts = self
                    .curve
                    .iter()
                    .map(boundary_germ)
                    .collect::<Result<_>>()?;
                CurveConfig::new(self.case, pts, None)
            }
            CurveCase::MeetsBoundary => {
                let (b, rest) = self
                    .curve
                    .split_first()
                    .ok_or_else(|| Error::InvalidConfig("empty curve".into()))?;
                let pts = rest.iter().map(off_curve).collect::<Result<_>>()?;
                CurveConfig::new(self.case, pts, Some(boundary_germ(b)?))
            }
            CurveCase::AwayFromBoundary => {
                let pts = self.curve.iter().map(off_curve).collect::<Result<_>>()?;
                CurveConfig::new(self.case, pts, None)
            }
        }
    }

    /// `(K.C)` of a flipping curve (`None` in case 1); errors when the curve
    /// is not K-negative and contractible.
    pub fn flipping_degree(&self) -> Result<Option<Rat>> {
        let cfg = self.curve_config()?;
        if self.case == CurveCase::DoubleCurve {
            return Ok(None);
        }
        let k = k_dot_c(&cfg)?;
        if !k.is_negative() {
            return Err(Error::NotFlipping(format!("(K.C) = {k}")));
        }
        let c2 = curve_self_intersection(&cfg)?;
        if !c2.is_negative() {
            return Err(Error::NotFlipping(format!("(C^2) = {c2}")));
        }
        Ok(Some(k))
    }

    fn fresh(&mut self, point: TerminalPoint) -> TrackedPoint {
        let id = self.next_id;
        self.next_id += 1;
        TrackedPoint { id, point }
    }

    /// Puts the curve through the largest point, alone.
    fn reanchor(&mut self) {
        let mut pool: Vec<TrackedPoint> = self.curve.drain(..).collect();
        pool.append(&mut self.extra_points);
        let Some(best) = (0..pool.len()).max_by(|&i, &j| pool[i].priority(&pool[j])) else {
            return;
        };
        let p = pool.remove(best);
        self.case = if p.on_double_curve() {
            CurveCase::MeetsBoundary
        } else {
            CurveCase::AwayFromBoundary
        };
        self.curve = vec![p];
        self.extra_points = pool;
    }

    fn log(&mut self, kind: Move, acting: (BigInt, u32), kc: Option<Rat>, kc_post: Rat) {
        let step = Step {
            index: self.step_log.len() + 1,
            kind,
            acting,
            measure: self.measure(),
            kc,
            kc_post,
            counter: self.counter,
        };
        self.step_log.push(step);
    }

    pub fn flip_step(&self) -> Result<FlipState> {
        if self.pending_flop.is_some() {
            return Err(Error::FlopPending);
        }
        let before = self.measure();
        if before.r_max.is_one() {
            return Err(Error::IndexOneFlip);
        }
        let kc = self.flipping_degree()?;
        let cfg = self.curve_config()?;
        let best = self.global_max().expect("r_max > 1").clone();
        let pos = self
            .curve
            .iter()
            .position(|p| p.id == best.id)
            .ok_or_else(|| Error::invariant("largest point is not on the flipping curve"))?;
        if pos != 0 && self.case != CurveCase::AwayFromBoundary {
            return Err(Error::invariant("largest point is not on the double curve"));
        }
        let st = best.point.simple_type();
        if !st.is_simple {
            return Err(Error::NotSimpleType(
                st.h.map_or_else(|| "none".into(), |h| h.to_string()),
            ));
        }
        let blowup = standard_blowup(&best.point)?;
        let p1 = (self.case == CurveCase::AwayFromBoundary).then_some(pos);
        let post = post_blowup_at(&cfg, p1)?;
        if post.route == Route::NewGerm {
            let a = best.point.a();
            let expected = if a.is_one() { BigInt::one() } else { a.clone() };
            if post.new_germ.n() != &expected {
                return Err(Error::invariant(format!(
                    "new point {} on E1 does not have index {expected}",
                    post.new_germ
                )));
            }
        }

        let mut next = self.clone();
        let mut others = next.curve.clone();
        others.remove(pos);
        next.curve.clear();
        let mut on_e1 = None;
        for child in blowup.children {
            let tracked = next.fresh(child.point);
            if child.chart == Chart::X {
                on_e1 = Some(tracked);
            } else {
                next.extra_points.push(tracked);
            }
        }
        let acting = (best.r().clone(), best.n());
        match post.branch {
            Branch::Flop => {
                next.extra_points.extend(on_e1);
                next.extra_points.extend(others);
                next.pending_flop = Some(acting.clone());
            }
            Branch::Flip => {
                let x = on_e1.ok_or_else(|| {
                    Error::invariant("K-negative strict transform without a point on E1")
                })?;
                next.case = CurveCase::MeetsBoundary;
                next.curve = std::iter::once(x).chain(others).collect();
                let k_new = k_dot_c(&next.curve_config()?)?;
                if k_new != post.k_dot_c {
                    return Err(Error::invariant(format!(
                        "strict transform has K-degree {k_new}, expected {}",
                        post.k_dot_c
                    )));
                }
                if next.global_max().map(|p| p.id) != Some(next.curve[0].id) {
                    next.reanchor();
                }
            }
        }
        let after = next.measure();
        if after >= before {
            return Err(Error::invariant(format!(
                "measure {before} did not decrease (now {after})"
            )));
        }
        next.log(Move::Flip, acting, kc, post.k_dot_c);
        Ok(next)
    }

    pub fn flop_step(&self) -> Result<FlipState> {
        let acting = self.pending_flop.clone().ok_or(Error::NotFlopBranch)?;
        let before = self.measure();
        let mut next = self.clone();
        next.pending_flop = None;
        next.counter += 1;
        next.reanchor();
        if next.measure() != before {
            return Err(Error::invariant("flop changed the measure"));
        }
        next.log(Move::Flop, acting, Some(Rat::zero()), Rat::zero());
        Ok(next)
    }

    /// `case=c points=[(r,a,n),...]`, curve points first, then the rest.
    pub fn describe(&self) -> String {
        let pts: Vec<String> = self
            .all_points()
            .map(|p| format!("({},{},{})", p.r(), p.point.a(), p.n()))
            .collect();
        format!("case={} points=[{}]", self.case, pts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EndReason {
    /// every remaining point has index 1
    IndexOne,
    /// the initial curve is not a flipping curve
    NoFlippingCurve,
}

impl fmt::Display for EndReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EndReason::IndexOne => "index-one",
            EndReason::NoFlippingCurve => "no-flipping-curve",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub state: FlipState,
    pub end: EndReason,
}

impl RunOutcome {
    pub fn trace(&self) -> &[Step] {
        self.state.step_log()
    }

    pub fn flips(&self) -> usize {
        self.trace().iter().filter(|s| s.kind == Move::Flip).count()
    }

    pub fn flops(&self) -> usize {
        self.trace().iter().filter(|s| s.kind == Move::Flop).count()
    }
}

/// `2 * sum(n r) + 1`: a point `(r, n)` needs at most `n (r - 1)` flips,
/// each followed by at most one flop.
pub fn default_max_steps(state: &FlipState) -> usize {
    let total: BigInt = state
        .all_points()
        .map(|p| p.r() * BigInt::from(p.n()))
        .sum();
    let bound: BigInt = total * 2 + 1;
    bound.to_usize().unwrap_or(usize::MAX)
}

pub fn run_sequence(state: &FlipState, max_steps: usize) -> Result<RunOutcome> {
    let mut s = state.clone();
    let mut taken = 0usize;
    loop {
        if s.pending_flop.is_none() && s.measure().r_max.is_one() {
            return Ok(RunOutcome {
                state: s,
                end: EndReason::IndexOne,
            });
        }
        if taken >= max_steps {
            return Err(Error::StepBudgetExceeded(max_steps));
        }
        s = if s.pending_flop.is_some() {
            s.flop_step()?
        } else {
            match s.flip_step() {
                Ok(next) => next,
                Err(Error::NotFlipping(_)) if taken == 0 => {
                    return Ok(RunOutcome {
                        state: s,
                        end: EndReason::NoFlippingCurve,
                    })
                }
                Err(e) => return Err(e),
            }
        };
        taken += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomStateParams {
    pub max_index: u32,
    pub max_multiplicity: u32,
}

impl Default for RandomStateParams {
    fn default() -> Self {
        RandomStateParams {
            max_index: 12,
            max_multiplicity: 4,
        }
    }
}

fn random_point<R: Rng + ?Sized>(
    rng: &mut R,
    params: &RandomStateParams,
    on_double: bool,
) -> TerminalPoint {
    let r = rng.gen_range(2..=params.max_index.max(2));
    let a = loop {
        let a = rng.gen_range(1..r);
        if a.gcd(&r) == 1 {
            break a;
        }
    };
    let n = rng.gen_range(1..=params.max_multiplicity.max(1));
    if on_double {
        TerminalPoint::on_double_curve(r, a, n).expect("valid parameters")
    } else {
        TerminalPoint::simple(r, a, n).expect("valid parameters")
    }
}

/// A flipping state of simple type, by rejection sampling.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, params: &RandomStateParams) -> FlipState {
    loop {
        let case = CurveCase::from_number(rng.gen_range(1..=3)).expect("1..=3");
        let mut points = vec![random_point(
            rng,
            params,
            case != CurveCase::AwayFromBoundary,
        )];
        if case != CurveCase::DoubleCurve && rng.gen_bool(0.5) {
            points.push(random_point(rng, params, false));
        }
        let state = FlipState::new(case, points).expect("generated points fit the case");
        if state.flipping_degree().is_ok() {
            return state;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunSummary {
    pub index: u64,
    pub initial: String,
    pub initial_measure: Measure,
    pub final_measure: Measure,
    pub flips: usize,
    pub flops: usize,
    pub end: EndReason,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} measure={}->{} flips={} flops={} end={}",
            self.index,
            self.initial,
            self.initial_measure,
            self.final_measure,
            self.flips,
            self.flops,
            self.end
        )
    }
}

fn run_instance(seed: u64, index: u64, params: &RandomStateParams) -> Result<RunSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let state = random_state(&mut rng, params);
    let outcome = run_sequence(&state, default_max_steps(&state))?;
    Ok(RunSummary {
        index,
        initial: state.describe(),
        initial_measure: state.measure(),
        final_measure: outcome.state.measure(),
        flips: outcome.flips(),
        flops: outcome.flops(),
        end: outcome.end,
    })
}

/// Runs `count` random instances in parallel. Instance `i` draws from its
/// own ChaCha stream, so the result equals [`monte_carlo_serial`].
pub fn monte_carlo(seed: u64, count: u64, params: &RandomStateParams) -> Result<Vec<RunSummary>> {
    (0..count)
        .into_par_iter()
        .map(|i| run_instance(seed, i, params))
        .collect()
}

pub fn monte_carlo_serial(
    seed: u64,
    count: u64,
    params: &RandomStateParams,
) -> Result<Vec<RunSummary>> {
    (0..count).map(|i| run_instance(seed, i, params)).collect()
}
