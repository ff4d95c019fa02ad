//! Line-oriented text form of an [`OperatorPoly`].
//!
//! Each line is one fraction monomial of one term:
//!
//! ```text
//! (-1/1)*g^2*hbar^-1*(wc+wr)^-1 * [ct c] * exp(0)
//! (1/1)*g*hbar^-1*(wc-wr)^-1 * [c rt] * exp(i*(-wc+wr)*t)
//! ```
//!
//! Lines with the same operator list and phase add. The zero polynomial is
//! the single line `0`.

use super::coeff::{fmt_fraction, parse_fraction};
use super::freq::FreqExpr;
use super::poly::{Ladder, ModeId, OperatorPoly};

/// The modes a parsed expression may refer to.
#[derive(Clone, Debug)]
pub struct ModeContext {
    modes: Vec<ModeId>,
}

impl ModeContext {
    pub fn new(modes: Vec<ModeId>) -> Result<Self, String> {
        let mut labels: Vec<&str> = modes.iter().map(|m| m.label()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err("mode labels must be unique".into());
        }
        Ok(ModeContext { modes })
    }

    /// Oscillators `c`, `r` and the bath family `a`.
    pub fn standard() -> Self {
        ModeContext {
            modes: vec![ModeId::c(), ModeId::r(), ModeId::a()],
        }
    }

    fn lookup(&self, label: &str) -> Option<&ModeId> {
        self.modes.iter().find(|m| m.label() == label)
    }

    fn parse_op(&self, token: &str) -> Result<Ladder, String> {
        if let Some(m) = self.lookup(token) {
            return Ok(Ladder::annihilate(m.clone()));
        }
        token
            .strip_suffix('t')
            .and_then(|base| self.lookup(base))
            .map(|m| Ladder::create(m.clone()))
            .ok_or_else(|| format!("unknown operator {token:?}"))
    }
}

fn fmt_phase(p: &FreqExpr) -> String {
    if p.is_zero() {
        "exp(0)".to_owned()
    } else {
        format!("exp(i*({p})*t)")
    }
}

fn parse_phase(s: &str) -> Result<FreqExpr, String> {
    let s = s.trim();
    if s == "exp(0)" {
        return Ok(FreqExpr::ZERO);
    }
    let inner = s
        .strip_prefix("exp(i*(")
        .and_then(|r| r.strip_suffix(")*t)"))
        .ok_or_else(|| format!("malformed phase {s:?}"))?;
    inner.parse()
}

pub fn render_lines(poly: &OperatorPoly) -> Vec<String> {
    let mut lines = Vec::new();
    for (m, p, c) in poly.iter() {
        let ops: Vec<String> = m.ops().iter().map(|o| o.to_string()).collect();
        for (key, q) in c.iter() {
            lines.push(format!(
                "{} * [{}] * {}",
                fmt_fraction(key, q),
                ops.join(" "),
                fmt_phase(p)
            ));
        }
    }
    lines
}

pub fn render(poly: &OperatorPoly) -> String {
    if poly.is_zero() {
        return "0".to_owned();
    }
    render_lines(poly).join("\n")
}

pub fn parse(text: &str, ctx: &ModeContext) -> Result<OperatorPoly, String> {
    let mut out = OperatorPoly::zero();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line == "0" {
            continue;
        }
        let err = |msg: String| format!("line {}: {msg}", lineno + 1);
        let (coeff, rest) = line
            .split_once(" * [")
            .ok_or_else(|| err("expected ' * [' after coefficient".into()))?;
        let (ops, phase) = rest
            .split_once("] * ")
            .ok_or_else(|| err("expected '] * ' after operator list".into()))?;
        let coeff = parse_fraction(coeff).map_err(err)?;
        let ops = ops
            .split_whitespace()
            .map(|t| ctx.parse_op(t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let phase = parse_phase(phase).map_err(err)?;
        out = &out + &OperatorPoly::word(ops, phase, coeff);
    }
    Ok(out)
}
