//! Acceptance gate. One line per criterion; exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::{
    evaluate_chain, family, family_triples, gcd, inverse_mod, quotient, random_sample, Shape,
};
use mmp_core::cyclic_quotient::{gorenstein_index, pullback_coefficient, resolve};
use mmp_core::flip_engine::{
    curve_self_intersection, curve_witness, default_max_steps, exclusion_sweep, k_dot_c,
    post_blowup_k_dot_c, random_state, run_sequence, EndReason, Measure, Move, RandomStateParams,
};
use mmp_core::numbers::{hj_evaluate, hj_expand, HJChain, Rat};
use mmp_core::terminal3fold::{standard_blowup, TerminalPoint};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn minimal_discrepancy() -> Outcome {
    let mut checked = 0;
    for r in 2..=50i64 {
        for a in (1..r).filter(|&a| gcd(a, r) == 1) {
            for p in [
                TerminalPoint::simple(r, a, 1).unwrap(),
                TerminalPoint::simple(r, a, 3).unwrap(),
                TerminalPoint::on_double_curve(r, a, 2).unwrap(),
            ] {
                let got = standard_blowup(&p)
                    .map_err(|e| format!("r={r} a={a}: {e}"))?
                    .discrepancy;
                ensure(got == Rat::new(1, r), || {
                    format!("r={r} a={a}: discrepancy {got}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} blowups, all 1/r"))
}

fn exclusion_table() -> Outcome {
    let report = exclusion_sweep(50).map_err(|e| e.to_string())?;
    let survivors = report.survivors();
    // -1 + 1/2 + 4/5, -1 + 1/2 + 2/3, -1 + 1/2 + 6/7
    let expected = vec![
        ("3b3", 5, Rat::new(-10 + 5 + 8, 10)),
        ("3b4", 3, Rat::new(-6 + 3 + 4, 6)),
        ("3b7", 6, Rat::new(-14 + 7 + 12, 14)),
    ];
    ensure(survivors == expected, || format!("survivors {survivors:?}"))?;
    ensure(report.all_excluded(), || "some row is OPEN".into())?;
    Ok(format!(
        "{} rows, survivors 3b3/5 3/10, 3b4/3 1/6, 3b7/6 5/14",
        report.rows.len()
    ))
}

fn closed_forms() -> Outcome {
    let triples = family_triples(400);
    for &(h, r, b) in &triples {
        let g = family(h, r, b).germ();
        let res = resolve(&g).map_err(|e| e.to_string())?;
        let end = &res.discrepancies[0];
        ensure(*end == Rat::new(b - r, r), || {
            format!("(h,r,b)=({h},{r},{b}): end discrepancy {end}")
        })?;
        let pb = pullback_coefficient(&g, 1).map_err(|e| e.to_string())?;
        ensure(pb == Rat::new(b * h * r - 1, h * r * r), || {
            format!("({h},{r},{b}): pullback {pb}")
        })?;
    }
    Ok(format!("{} triples with hr^2 <= 400", triples.len()))
}

fn index_coherence() -> Outcome {
    let triples = family_triples(400);
    for &(h, r, b) in &triples {
        let n = h * r * r;
        let q = b * h * r - 1;
        // smallest m with m(q + 1) = 0 mod n
        let by_hand = (1..=n).find(|m| (m * (q + 1)) % n == 0).unwrap();
        let got = gorenstein_index(&quotient(n, q));
        ensure(got == BigInt::from(r) && by_hand == r, || {
            format!("({h},{r},{b}): index {got}, by hand {by_hand}")
        })?;
    }
    Ok(format!("{} triples, index r", triples.len()))
}

fn post_blowup_sign() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let shapes = [Shape::DoubleCurve, Shape::Boundary, Shape::Away];
    const QUOTA: [usize; 3] = [3334, 3333, 3333];
    let mut accepted = [0usize; 3];
    let mut drawn = 0usize;
    while accepted.iter().sum::<usize>() < 10_000 {
        drawn += 1;
        let which = drawn % 3;
        if accepted[which] >= QUOTA[which] {
            continue;
        }
        let s = random_sample(&mut rng, shapes[which], 200);
        if s.shape == Shape::DoubleCurve {
            let post = post_blowup_k_dot_c(&s.cfg).map_err(|e| e.to_string())?;
            ensure(post.k_dot_c == Rat::zero(), || {
                format!("double curve post {}", post.k_dot_c)
            })?;
            accepted[which] += 1;
            continue;
        }
        let k = k_dot_c(&s.cfg).map_err(|e| e.to_string())?;
        let c2 = curve_self_intersection(&s.cfg).map_err(|e| e.to_string())?;
        if !k.is_negative() || !c2.is_negative() {
            continue;
        }
        accepted[which] += 1;
        let ((r1, b1), (r2, b2)) = (s.p1, s.p2);
        let e = b1 * r2 + b2 * r1 - r1 * r2;
        let a1 = inverse_mod(b1, r1);
        let ctx = || format!("{:?} p1=({r1},{b1}) p2=({r2},{b2})", s.shape);
        ensure(e > 0, || format!("{}: e = {e}", ctx()))?;
        ensure((r2 - a1 * e).rem_euclid(r1) == 0, || {
            format!("{}: congruence", ctx())
        })?;
        ensure(r2 <= a1 * e, || format!("{}: r2 > a1 e", ctx()))?;
        let w = curve_witness(&s.cfg).map_err(|e| e.to_string())?;
        ensure(w.e == BigInt::from(e) && w.a1 == BigInt::from(a1), || {
            format!("{}: witness {w:?}", ctx())
        })?;
        let post = post_blowup_k_dot_c(&s.cfg).map_err(|e| format!("{}: {e}", ctx()))?;
        // 1/(a1 r1) - e/(r1 r2)
        let by_hand = Rat::new(r2 - a1 * e, a1 * r1 * r2);
        ensure(post.k_dot_c == by_hand, || {
            format!("{}: post {} vs {by_hand}", ctx(), post.k_dot_c)
        })?;
        ensure(!post.k_dot_c.is_positive(), || {
            format!("{}: post {} > 0", ctx(), post.k_dot_c)
        })?;
    }
    Ok(format!(
        "{} configs (case1 {}, case2 {}, case3 {}), 0 counterexamples",
        accepted.iter().sum::<usize>(),
        accepted[0],
        accepted[1],
        accepted[2]
    ))
}

fn termination() -> Outcome {
    let params = RandomStateParams::default();
    let mut flips = 0usize;
    for i in 0..10_000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xf11b);
        rng.set_stream(i);
        let state = random_state(&mut rng, &params);
        for p in state.curve_points().iter().chain(state.extra_points()) {
            ensure(p.point.simple_type().is_simple, || {
                format!("run {i}: initial point not simple")
            })?;
        }
        let out =
            run_sequence(&state, default_max_steps(&state)).map_err(|e| format!("run {i}: {e}"))?;
        let mut before = state.measure();
        for step in out.trace() {
            match step.kind {
                Move::Flip => {
                    ensure(before.r_max > BigInt::from(1), || {
                        format!("run {i}: flip at r_max 1")
                    })?;
                    ensure(step.measure < before, || {
                        format!("run {i}: measure {before} -> {}", step.measure)
                    })?;
                    flips += 1;
                }
                Move::Flop => ensure(step.measure == before, || {
                    format!("run {i}: flop moved the measure")
                })?,
            }
            before = step.measure.clone();
        }
        ensure(out.end == EndReason::IndexOne, || {
            format!("run {i}: ended {}", out.end)
        })?;
        ensure(before == Measure::from_pairs([]), || {
            format!("run {i}: final measure {before}")
        })?;
    }
    Ok(format!("10000 runs, {flips} flips, all terminated"))
}

fn hj_identities() -> Outcome {
    let mut pairs = 0;
    for n in 2..=200i64 {
        for q in (1..n).filter(|&q| gcd(q, n) == 1) {
            let chain = hj_expand(&BigInt::from(n), &BigInt::from(q)).map_err(|e| e.to_string())?;
            let small: Vec<i64> = chain
                .entries()
                .iter()
                .map(|b| i64::try_from(b).unwrap())
                .collect();
            ensure(evaluate_chain(&small) == (n, q), || {
                format!("({n},{q}) expands to {small:?}")
            })?;
            ensure(
                hj_evaluate(&chain) == (BigInt::from(n), BigInt::from(q)),
                || format!("({n},{q}) round trip"),
            )?;
            pairs += 1;
        }
    }
    for l in 3..=30i64 {
        let got = hj_evaluate(&HJChain::from_small(&[2, l, 2]).unwrap());
        ensure(
            got == (BigInt::from(4 * l - 4), BigInt::from(2 * l - 1)),
            || format!("[2,{l},2] -> {got:?}"),
        )?;
    }
    Ok(format!("{pairs} pairs round trip, [2,l,2] for l in 3..30"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        (
            "minimal discrepancy 1/r",
            Duration::from_secs(1),
            minimal_discrepancy,
        ),
        (
            "interior-meeting exclusion table",
            Duration::from_secs(5),
            exclusion_table,
        ),
        (
            "closed form vs solver",
            Duration::from_secs(10),
            closed_forms,
        ),
        ("index coherence", Duration::from_secs(10), index_coherence),
        (
            "post-blowup sign and witnesses",
            Duration::from_secs(30),
            post_blowup_sign,
        ),
        (
            "termination of flip sequences",
            Duration::from_secs(60),
            termination,
        ),
        (
            "HJ round trip and chain identities",
            Duration::from_secs(10),
            hj_identities,
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > limit => Err(format!("{detail}; took {took:.2?} over {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} ({took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} ({took:.2?})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
