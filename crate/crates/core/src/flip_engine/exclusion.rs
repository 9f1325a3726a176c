//! Sweep over the chain shapes that an interior meeting (`1 < j0 < d1`,
//! case 3) would force, checking that none of them is a flipping curve.

use std::fmt;

use crate::cyclic_quotient::{contract_chain, is_corollary43_type, CyclicQuotientType};
use crate::error::{Error, Result};
use crate::numbers::{HJChain, Rat};

use super::{k_dot_c, CurveCase, CurveConfig, PointOnCurve};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowVerdict {
    /// some germ is not of type `1/hr^2(bhr - 1, 1)`
    ExcludedByType,
    /// `(K.C) > 0`
    ExcludedBySign,
    /// neither test rules the configuration out
    Open,
}

impl fmt::Display for RowVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowVerdict::ExcludedByType => "excluded:type",
            RowVerdict::ExcludedBySign => "excluded:sign",
            RowVerdict::Open => "OPEN",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExclusionRow {
    pub case: &'static str,
    pub ell: Option<u32>,
    pub p1: Option<CyclicQuotientType>,
    pub p2: Vec<CyclicQuotientType>,
    pub passes_filter: bool,
    pub k_dot_c: Option<Rat>,
    pub verdict: RowVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExclusionReport {
    pub l_max: u32,
    pub rows: Vec<ExclusionRow>,
}

impl ExclusionReport {
    /// `(case, ell, K.C)` for rows passing the type filter.
    pub fn survivors(&self) -> Vec<(&'static str, u32, Rat)> {
        self.rows
            .iter()
            .filter(|r| r.passes_filter)
            .map(|r| {
                (
                    r.case,
                    r.ell.expect("survivors come from ell-dependent shapes"),
                    r.k_dot_c.clone().expect("survivors carry K.C"),
                )
            })
            .collect()
    }

    pub fn all_excluded(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != RowVerdict::Open)
    }

    pub fn render(&self) -> String {
        let header = ["case", "ell", "P1", "P2", "filter", "K.C", "verdict"];
        let cells: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                let p2 = if r.p2.is_empty() {
                    "-".to_string()
                } else {
                    r.p2.iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join("|")
                };
                [
                    r.case.to_string(),
                    r.ell.map_or_else(|| "-".to_string(), |l| l.to_string()),
                    r.p1.as_ref()
                        .map_or_else(|| "-".to_string(), ToString::to_string),
                    p2,
                    if r.passes_filter { "pass" } else { "fail" }.to_string(),
                    r.k_dot_c
                        .as_ref()
                        .map_or_else(|| "-".to_string(), ToString::to_string),
                    r.verdict.to_string(),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let mut push = |row: &[&str]| {
            let line: Vec<String> = row
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        };
        push(&header);
        for row in &cells {
            push(&row.each_ref().map(String::as_str));
        }
        out
    }
}

/// Chains of `P1` listed from `F_{1,1}`; `C` meets position 2. The middle
/// entry is `ell`.
const SHAPES: [(&str, &[i64], u32); 9] = [
    ("3b1", &[2, 0, 2], 3),
    ("3b3", &[2, 0, 3], 2),
    ("3b4", &[2, 0, 4], 2),
    ("3b5", &[2, 0, 5], 2),
    ("3b6", &[2, 0, 2, 2], 2),
    ("3b7", &[2, 0, 2, 3], 2),
    ("3b8", &[2, 0, 3, 2], 2),
    ("3b9", &[2, 0, 2, 2, 2], 2),
    ("3b10", &[2, 0, 2, 2, 2, 2], 2),
];

fn chain_germ(entries: &[i64]) -> CyclicQuotientType {
    contract_chain(&HJChain::from_small(entries).expect("entries are at least 2"))
}

/// Companions `P2` forced in the type E shapes: `[4]` or `[3,3]`.
fn e_companions() -> Vec<CyclicQuotientType> {
    vec![chain_germ(&[4]), chain_germ(&[3, 3])]
}

fn shape_row(case: &'static str, template: &[i64], ell: u32) -> Result<ExclusionRow> {
    let entries: Vec<i64> = template
        .iter()
        .map(|&b| if b == 0 { i64::from(ell) } else { b })
        .collect();
    let p1 = chain_germ(&entries);
    let p2 = if case == "3b1" {
        Vec::new()
    } else {
        e_companions()
    };
    let passes_filter =
        is_corollary43_type(&p1).is_some() && p2.iter().all(|g| is_corollary43_type(g).is_some());
    let mut k = None;
    if passes_filter {
        for companion in &p2 {
            let cfg = CurveConfig::new(
                CurveCase::AwayFromBoundary,
                vec![
                    PointOnCurve::new(p1.clone(), 2)?,
                    PointOnCurve::new(companion.clone(), 1)?,
                ],
                None,
            )?;
            let value = k_dot_c(&cfg)?;
            match &k {
                Some(prev) if prev != &value => {
                    return Err(Error::invariant(format!(
                        "{case} ell={ell}: companions give K.C {prev} and {value}"
                    )))
                }
                _ => k = Some(value),
            }
        }
    }
    let verdict = match &k {
        None => RowVerdict::ExcludedByType,
        Some(v) if v.is_positive() => RowVerdict::ExcludedBySign,
        Some(_) => RowVerdict::Open,
    };
    Ok(ExclusionRow {
        case,
        ell: Some(ell),
        p1: Some(p1),
        p2,
        passes_filter,
        k_dot_c: k,
        verdict,
    })
}

/// One row per `(case, ell)` with `ell <= l_max`; the `ell`-free shape with
/// companion `[3]` gets a single row.
pub fn exclusion_sweep(l_max: u32) -> Result<ExclusionReport> {
    if l_max < 7 {
        return Err(Error::InvalidConfig(format!(
            "l_max must be at least 7, got {l_max}"
        )));
    }
    let mut rows = Vec::new();
    for (case, template, ell_min) in SHAPES {
        if case == "3b3" {
            let p2 = chain_germ(&[3]);
            let passes_filter = is_corollary43_type(&p2).is_some();
            rows.push(ExclusionRow {
                case: "3b2",
                ell: None,
                p1: None,
                p2: vec![p2],
                passes_filter,
                k_dot_c: None,
                verdict: if passes_filter {
                    RowVerdict::Open
                } else {
                    RowVerdict::ExcludedByType
                },
            });
        }
        for ell in ell_min..=l_max {
            rows.push(shape_row(case, template, ell)?);
        }
    }
    Ok(ExclusionReport { l_max, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::int;

    #[test]
    fn three_b_one_is_never_of_family_type() {
        for ell in 3..=30 {
            let g = chain_germ(&[2, ell, 2]);
            assert_eq!(
                (g.n().clone(), g.q().clone()),
                (int(4 * ell - 4), int(2 * ell - 1))
            );
            assert_eq!(is_corollary43_type(&g), None);
        }
    }

    #[test]
    fn survivors_at_fifty() {
        let report = exclusion_sweep(50).unwrap();
        assert_eq!(
            report.survivors(),
            vec![
                ("3b3", 5, Rat::new(3, 10)),
                ("3b4", 3, Rat::new(1, 6)),
                ("3b7", 6, Rat::new(5, 14)),
            ]
        );
        assert!(report.all_excluded());
        let rendered = report.render();
        assert!(rendered.lines().next().unwrap().starts_with("case"));
        assert_eq!(rendered.lines().count(), report.rows.len() + 1);
    }

    #[test]
    fn rejects_small_range() {
        assert!(exclusion_sweep(6).is_err());
    }
}
