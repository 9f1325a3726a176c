//! Instance files: whitespace-separated `key=value` tokens, `#` comments.
//! Values are integers or bracketed tuple lists such as `[(0,2),(1,1)]`,
//! which may contain whitespace and span lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::cyclic_quotient::CyclicQuotientType;
use crate::error::{Error, Result};
use crate::flip_engine::{CurveCase, CurveConfig, FlipState, PointOnCurve};
use crate::terminal3fold::{GermSeries, TerminalPoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Quotient(CyclicQuotientType),
    TerminalPoint(TerminalPoint),
    CurveConfig(CurveConfig),
    FlipState(FlipStateInput),
}

/// Points as `(r, a, n)`. The point on the double curve (cases 1 and 2,
/// listed first) gets `G = tau^n + tau z^r`, the others `G = tau^n + z^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipStateInput {
    pub case: CurveCase,
    pub points: Vec<(BigInt, BigInt, u32)>,
}

impl FlipStateInput {
    pub fn build(&self) -> Result<FlipState> {
        let pts = self
            .points
            .iter()
            .enumerate()
            .map(|(i, (r, a, n))| {
                if i == 0 && self.case != CurveCase::AwayFromBoundary {
                    TerminalPoint::on_double_curve(r.clone(), a.clone(), *n)
                } else {
                    TerminalPoint::simple(r.clone(), a.clone(), *n)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        FlipState::new(self.case, pts)
    }
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Quotient(_) => "quotient",
            Instance::TerminalPoint(_) => "terminal_point",
            Instance::CurveConfig(_) => "curve_config",
            Instance::FlipState(_) => "flip_state",
        }
    }
}

type Pos = (usize, usize);

#[derive(Clone, Debug)]
struct Token {
    chars: Vec<(char, Pos)>,
}

impl Token {
    fn pos(&self) -> Pos {
        self.chars[0].1
    }
}

fn perr((line, column): Pos, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut cur: Vec<(char, Pos)> = Vec::new();
    let mut depth = 0i32;
    let mut open_at = (1, 1);
    for (li, line) in text.lines().enumerate() {
        let mut comment = false;
        for (ci, ch) in line.chars().enumerate() {
            let pos = (li + 1, ci + 1);
            if comment || ch == '#' {
                comment = true;
                continue;
            }
            if ch.is_whitespace() {
                if depth == 0 && !cur.is_empty() {
                    tokens.push(Token {
                        chars: std::mem::take(&mut cur),
                    });
                }
                continue;
            }
            match ch {
                '[' | '(' => {
                    if depth == 0 {
                        open_at = pos;
                    }
                    depth += 1;
                }
                ']' | ')' => {
                    depth -= 1;
                    if depth < 0 {
                        return Err(perr(pos, format!("unbalanced '{ch}'")));
                    }
                }
                _ => {}
            }
            cur.push((ch, pos));
        }
        if depth == 0 && !cur.is_empty() {
            tokens.push(Token {
                chars: std::mem::take(&mut cur),
            });
        }
    }
    if depth != 0 {
        return Err(perr(open_at, "unclosed bracket"));
    }
    if !cur.is_empty() {
        tokens.push(Token { chars: cur });
    }
    Ok(tokens)
}

struct Field {
    key_pos: Pos,
    value: Vec<(char, Pos)>,
}

impl Field {
    fn value_pos(&self) -> Pos {
        self.value.first().map_or(self.key_pos, |c| c.1)
    }

    fn text(&self) -> String {
        self.value.iter().map(|c| c.0).collect()
    }
}

fn parse_int<T: std::str::FromStr>(chars: &[(char, Pos)], fallback: Pos, what: &str) -> Result<T> {
    let s: String = chars.iter().map(|c| c.0).collect();
    let pos = chars.first().map_or(fallback, |c| c.1);
    s.parse()
        .map_err(|_| perr(pos, format!("expected an integer for {what}, found {s:?}")))
}

/// Parses `[(x,y,..),(..)]` into tuples of exactly `arity` components.
/// Characters of one tuple component, each with its source position.
type Component = Vec<(char, Pos)>;

fn parse_tuples(field: &Field, arity: usize, what: &str) -> Result<Vec<Vec<Component>>> {
    let v = &field.value;
    let end_pos = v.last().map_or(field.key_pos, |c| c.1);
    let expect = |i: usize, ch: char| -> Result<()> {
        match v.get(i) {
            Some((c, _)) if *c == ch => Ok(()),
            Some((c, p)) => Err(perr(*p, format!("expected '{ch}' in {what}, found '{c}'"))),
            None => Err(perr(
                end_pos,
                format!("expected '{ch}' in {what}, found end of value"),
            )),
        }
    };
    expect(0, '[')?;
    let mut i = 1;
    let mut tuples = Vec::new();
    if v.get(i).is_some_and(|c| c.0 == ']') {
        i += 1;
    } else {
        loop {
            expect(i, '(')?;
            let open = v[i].1;
            i += 1;
            let mut parts = vec![Vec::new()];
            while let Some(&(c, p)) = v.get(i) {
                match c {
                    ',' => parts.push(Vec::new()),
                    ')' => break,
                    '(' | '[' | ']' => return Err(perr(p, format!("unexpected '{c}' in {what}"))),
                    _ => parts.last_mut().expect("nonempty").push((c, p)),
                }
                i += 1;
            }
            expect(i, ')')?;
            i += 1;
            if parts.len() != arity {
                return Err(perr(
                    open,
                    format!(
                        "{what} entries need {arity} components, found {}",
                        parts.len()
                    ),
                ));
            }
            tuples.push(parts);
            match v.get(i) {
                Some((',', _)) => i += 1,
                _ => break,
            }
        }
        expect(i, ']')?;
        i += 1;
    }
    if let Some((c, p)) = v.get(i) {
        return Err(perr(*p, format!("trailing '{c}' after {what}")));
    }
    Ok(tuples)
}

const KINDS: [(&str, &[&str]); 4] = [
    ("quotient", &["n", "q"]),
    ("terminal_point", &["r", "a", "g"]),
    ("curve_config", &["case", "points"]),
    ("flip_state", &["case", "points"]),
];

pub fn parse_instance(text: &str) -> Result<Instance> {
    let tokens = tokenize(text)?;
    let mut fields: BTreeMap<String, Field> = BTreeMap::new();
    for tok in &tokens {
        let eq = tok
            .chars
            .iter()
            .position(|c| c.0 == '=')
            .ok_or_else(|| perr(tok.pos(), "expected key=value"))?;
        let key: String = tok.chars[..eq].iter().map(|c| c.0).collect();
        if key.is_empty() {
            return Err(perr(tok.pos(), "empty key"));
        }
        let field = Field {
            key_pos: tok.pos(),
            value: tok.chars[eq + 1..].to_vec(),
        };
        if field.value.is_empty() {
            return Err(perr(
                tok.chars[eq].1,
                format!("missing value for key '{key}'"),
            ));
        }
        if fields.insert(key.clone(), field).is_some() {
            return Err(perr(tok.pos(), format!("duplicate key '{key}'")));
        }
    }
    let kind_field = fields
        .remove("kind")
        .ok_or_else(|| perr((1, 1), "missing key 'kind'"))?;
    let kind = kind_field.text();
    let (_, expected) = KINDS.iter().find(|(k, _)| *k == kind).ok_or_else(|| {
        let names: Vec<&str> = KINDS.iter().map(|(k, _)| *k).collect();
        perr(
            kind_field.value_pos(),
            format!(
                "unknown kind '{kind}' (expected one of: {})",
                names.join(", ")
            ),
        )
    })?;
    for (key, f) in &fields {
        if !expected.contains(&key.as_str()) {
            return Err(perr(
                f.key_pos,
                format!(
                    "unknown key '{key}' for kind {kind} (expected: {})",
                    expected.join(", ")
                ),
            ));
        }
    }
    let anchor = kind_field.key_pos;
    for key in expected.iter() {
        if !fields.contains_key(*key) {
            return Err(perr(
                anchor,
                format!(
                    "missing key '{key}' for kind {kind} (expected: {})",
                    expected.join(", ")
                ),
            ));
        }
    }
    let get = |k: &str| &fields[k];
    // domain validation failures are reported at the kind token
    let invalid = |e: Error| perr(anchor, e.to_string());

    match kind.as_str() {
        "quotient" => {
            let n: BigInt = parse_int(&get("n").value, get("n").key_pos, "n")?;
            let q: BigInt = parse_int(&get("q").value, get("q").key_pos, "q")?;
            CyclicQuotientType::new(n, q)
                .map(Instance::Quotient)
                .map_err(invalid)
        }
        "terminal_point" => {
            let r: BigInt = parse_int(&get("r").value, get("r").key_pos, "r")?;
            let a: BigInt = parse_int(&get("a").value, get("a").key_pos, "a")?;
            let g = get("g");
            let mut pairs = Vec::new();
            for t in parse_tuples(g, 2, "g")? {
                let k: u32 = parse_int(&t[0], g.value_pos(), "exponent k")?;
                let val: u32 = parse_int(&t[1], g.value_pos(), "valuation")?;
                pairs.push((k, val));
            }
            let series = GermSeries::from_pairs(pairs).map_err(invalid)?;
            TerminalPoint::new(r, a, series)
                .map(Instance::TerminalPoint)
                .map_err(invalid)
        }
        "curve_config" => {
            let case = parse_case(get("case"))?;
            let pf = get("points");
            let mut pts = Vec::new();
            for t in parse_tuples(pf, 3, "points")? {
                let n: BigInt = parse_int(&t[0], pf.value_pos(), "n")?;
                let q: BigInt = parse_int(&t[1], pf.value_pos(), "q")?;
                let meet: usize = parse_int(&t[2], pf.value_pos(), "meet")?;
                let germ = CyclicQuotientType::new(n, q).map_err(invalid)?;
                pts.push(PointOnCurve::new(germ, meet).map_err(invalid)?);
            }
            let boundary = if case == CurveCase::MeetsBoundary && !pts.is_empty() {
                Some(pts.remove(0))
            } else {
                None
            };
            CurveConfig::new(case, pts, boundary)
                .map(Instance::CurveConfig)
                .map_err(invalid)
        }
        "flip_state" => {
            let case = parse_case(get("case"))?;
            let pf = get("points");
            let mut pts = Vec::new();
            for t in parse_tuples(pf, 3, "points")? {
                let r: BigInt = parse_int(&t[0], pf.value_pos(), "r")?;
                let a: BigInt = parse_int(&t[1], pf.value_pos(), "a")?;
                let n: u32 = parse_int(&t[2], pf.value_pos(), "n")?;
                pts.push((r, a, n));
            }
            let input = FlipStateInput { case, points: pts };
            input.build().map_err(invalid)?;
            Ok(Instance::FlipState(input))
        }
        _ => unreachable!("kind checked above"),
    }
}

fn parse_case(f: &Field) -> Result<CurveCase> {
    let n: u8 = parse_int(&f.value, f.key_pos, "case")?;
    CurveCase::from_number(n).map_err(|e| perr(f.value_pos(), e.to_string()))
}

/// Canonical one-line form; `parse_instance` reads it back unchanged.
pub fn serialize(instance: &Instance) -> String {
    let mut s = format!("kind={}", instance.kind());
    match instance {
        Instance::Quotient(t) => {
            let _ = write!(s, " n={} q={}", t.n(), t.q());
        }
        Instance::TerminalPoint(p) => {
            let g: Vec<String> = p.g().terms().map(|(k, v)| format!("({k},{v})")).collect();
            let _ = write!(s, " r={} a={} g=[{}]", p.r(), p.a(), g.join(","));
        }
        Instance::CurveConfig(cfg) => {
            let pts: Vec<String> = cfg
                .boundary()
                .into_iter()
                .chain(cfg.points())
                .map(|p| format!("({},{},{})", p.germ.n(), p.germ.q(), p.meet))
                .collect();
            let _ = write!(s, " case={} points=[{}]", cfg.case(), pts.join(","));
        }
        Instance::FlipState(input) => {
            let pts: Vec<String> = input
                .points
                .iter()
                .map(|(r, a, n)| format!("({r},{a},{n})"))
                .collect();
            let _ = write!(s, " case={} points=[{}]", input.case, pts.join(","));
        }
    }
    s.push('\n');
    s
}
