// Shared generators and hand-rolled oracles for the integration tests.
#![allow(dead_code)]

use mmp_core::cyclic_quotient::{CyclicQuotientType, FamilyParams};
use mmp_core::flip_engine::{CurveCase, CurveConfig, PointOnCurve};
use num_bigint::BigInt;
use rand::Rng;

pub fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Brute-force inverse; fine for the small moduli used here.
pub fn inverse_mod(a: i64, m: i64) -> i64 {
    if m == 1 {
        return 1;
    }
    (1..m).find(|x| (a * x).rem_euclid(m) == 1).expect("unit")
}

/// Every `(h, r, b)` with `h r^2 <= bound`, `r >= 2`, `0 < b < r` coprime.
pub fn family_triples(bound: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for r in 2..=bound {
        if r * r > bound {
            break;
        }
        for h in 1..=bound / (r * r) {
            for b in 1..r {
                if gcd(b, r) == 1 {
                    out.push((h, r, b));
                }
            }
        }
    }
    out
}

pub fn family(h: i64, r: i64, b: i64) -> FamilyParams {
    FamilyParams::new(h, r, b).unwrap()
}

/// Which shape a random configuration came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    DoubleCurve,
    /// boundary point met at its chain end (or smooth)
    Boundary,
    /// both points met at chain ends, `P1` with `h = 1`
    Away,
}

/// Plain integer data behind a generated configuration, kept so the tests
/// can recompute the witnesses without going through the library.
#[derive(Clone, Debug)]
pub struct Sample {
    pub shape: Shape,
    /// `(r1, b1)` of the blown-up point; `(1, 1)` when smooth.
    pub p1: (i64, i64),
    /// `(r2, b2)` of the companion; `(1, 1)` when smooth or absent.
    pub p2: (i64, i64),
    pub cfg: CurveConfig,
}

fn pick_family<R: Rng>(rng: &mut R, triples: &[(i64, i64, i64)]) -> (i64, i64, i64) {
    triples[rng.gen_range(0..triples.len())]
}

fn companion<R: Rng>(
    rng: &mut R,
    triples: &[(i64, i64, i64)],
) -> (Option<PointOnCurve>, (i64, i64)) {
    match rng.gen_range(0..6) {
        0 => (None, (1, 1)),
        1 => (Some(PointOnCurve::smooth()), (1, 1)),
        _ => {
            let (h, r, b) = pick_family(rng, triples);
            (Some(PointOnCurve::family(&family(h, r, b))), (r, b))
        }
    }
}

/// One random configuration in the given shape; may or may not be flipping.
pub fn random_sample<R: Rng>(rng: &mut R, shape: Shape, bound: i64) -> Sample {
    let triples = family_triples(bound);
    match shape {
        Shape::DoubleCurve => {
            let mut points = Vec::new();
            for _ in 0..rng.gen_range(1..=2) {
                let (_, r, b) = pick_family(rng, &triples);
                points.push(PointOnCurve::boundary_end(r, inverse_mod(b, r)).unwrap());
            }
            let cfg = CurveConfig::double_curve(points).unwrap();
            Sample {
                shape,
                p1: (1, 1),
                p2: (1, 1),
                cfg,
            }
        }
        Shape::Boundary => loop {
            let (boundary, p1) = if rng.gen_range(0..8) == 0 {
                (PointOnCurve::smooth(), (1, 1))
            } else {
                let (_, r, b) = pick_family(rng, &triples);
                // D-side label 1/r(a, 1) with a b = 1 mod r
                (
                    PointOnCurve::boundary_end(r, inverse_mod(b, r)).unwrap(),
                    (r, b),
                )
            };
            let (other, p2) = companion(rng, &triples);
            // all points index one: nothing to flip, draw again
            let Ok(cfg) = CurveConfig::new(
                CurveCase::MeetsBoundary,
                other.into_iter().collect(),
                Some(boundary),
            ) else {
                continue;
            };
            break Sample { shape, p1, p2, cfg };
        },
        Shape::Away => loop {
            let ones: Vec<_> = triples.iter().copied().filter(|t| t.0 == 1).collect();
            let (_, r1, b1) = pick_family(rng, &ones);
            let (other, p2) = companion(rng, &triples);
            // the blown-up point is the one of larger index
            if p2.0 > r1
                || (p2.0 == r1
                    && other
                        .as_ref()
                        .and_then(|p| p.family.as_ref())
                        .is_some_and(|f| f.h > BigInt::from(1)))
            {
                continue;
            }
            let mut points = vec![PointOnCurve::family(&family(1, r1, b1))];
            points.extend(other);
            let cfg = CurveConfig::new(CurveCase::AwayFromBoundary, points, None).unwrap();
            break Sample {
                shape,
                p1: (r1, b1),
                p2,
                cfg,
            };
        },
    }
}

/// `1/n(q, 1)` by its chain, evaluated right to left with plain integers.
pub fn evaluate_chain(entries: &[i64]) -> (i64, i64) {
    let (mut n, mut q) = (1i64, 0i64);
    for &b in entries.iter().rev() {
        (n, q) = (b * n - q, n);
    }
    (n, q)
}

pub fn quotient(n: i64, q: i64) -> CyclicQuotientType {
    CyclicQuotientType::new(n, q).unwrap()
}
