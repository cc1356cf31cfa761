//! Text form of strategies, as accepted on the command line.
//!
//! ```text
//! pure:F,N                       one move label per owned turn
//! mixed:0.5[;0.25...]            per-turn weight on move 1 (F / D)
//! u2:alpha,phi1,phi2[;...]       one angle triple per turn, radians
//! ```
//!
//! Later `u2` triples may repeat the `u2:` prefix. Error positions are
//! zero-based byte offsets into the input.

use crate::error::{Error, Result};
use crate::game::{u2_angles, Player, QuantumGame, Strategy};

/// A parsed specification not yet bound to a game.
#[derive(Clone, Debug, PartialEq)]
pub enum SpecForm {
    /// Move labels with their offsets.
    Pure(Vec<(usize, String)>),
    Mixed(Vec<f64>),
    U2(Vec<[f64; 3]>),
}

fn err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

/// Splits `s` on `sep`, yielding each piece with its byte offset.
fn pieces(s: &str, base: usize, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if ch == sep {
            out.push((base + start, &s[start..i]));
            start = i + ch.len_utf8();
        }
    }
    out.push((base + start, &s[start..]));
    out
}

fn trimmed(pos: usize, s: &str) -> (usize, &str) {
    let lead = s.len() - s.trim_start().len();
    (pos + lead, s.trim())
}

fn number(pos: usize, s: &str) -> Result<f64> {
    let (pos, t) = trimmed(pos, s);
    if t.is_empty() {
        return Err(err(pos, "expected a number"));
    }
    let x: f64 = t
        .parse()
        .map_err(|_| err(pos, format!("`{t}` is not a number")))?;
    if !x.is_finite() {
        return Err(err(pos, format!("`{t}` is not finite")));
    }
    Ok(x)
}

pub fn parse_spec(text: &str) -> Result<SpecForm> {
    let Some(colon) = text.find(':') else {
        return Err(err(0, "expected `pure:`, `mixed:` or `u2:`"));
    };
    let (kpos, kind) = trimmed(0, &text[..colon]);
    let body_pos = colon + 1;
    let body = &text[body_pos..];
    if body.trim().is_empty() {
        return Err(err(body_pos, "empty strategy body"));
    }
    match kind {
        "pure" => pieces(body, body_pos, ',')
            .into_iter()
            .map(|(p, s)| {
                let (p, t) = trimmed(p, s);
                if t.is_empty() {
                    Err(err(p, "empty move label"))
                } else {
                    Ok((p, t.to_string()))
                }
            })
            .collect::<Result<_>>()
            .map(SpecForm::Pure),
        "mixed" => pieces(body, body_pos, ';')
            .into_iter()
            .map(|(p, s)| {
                let x = number(p, s)?;
                if (0.0..=1.0).contains(&x) {
                    Ok(x)
                } else {
                    Err(err(
                        trimmed(p, s).0,
                        format!("probability {x} outside [0, 1]"),
                    ))
                }
            })
            .collect::<Result<_>>()
            .map(SpecForm::Mixed),
        "u2" => pieces(body, body_pos, ';')
            .into_iter()
            .map(|(p, s)| {
                let (mut p, mut t) = trimmed(p, s);
                if let Some(rest) = t.strip_prefix("u2:") {
                    p += 3;
                    t = rest;
                }
                let parts = pieces(t, p, ',');
                if parts.len() != 3 {
                    return Err(err(p, format!("expected 3 angles, found {}", parts.len())));
                }
                Ok([
                    number(parts[0].0, parts[0].1)?,
                    number(parts[1].0, parts[1].1)?,
                    number(parts[2].0, parts[2].1)?,
                ])
            })
            .collect::<Result<_>>()
            .map(SpecForm::U2),
        other => Err(err(kpos, format!("unknown strategy kind `{other}`"))),
    }
}

/// Parses `text` and binds it to `player`'s alphabet in `game`.
pub fn parse_strategy(text: &str, game: &QuantumGame, player: Player) -> Result<Strategy> {
    let space = game.space(player);
    match parse_spec(text)? {
        SpecForm::Pure(labels) => labels
            .into_iter()
            .map(|(p, l)| {
                space.move_index(&l).ok_or_else(|| {
                    let known: Vec<&str> = space.moves.iter().map(|m| m.label.as_str()).collect();
                    err(
                        p,
                        format!("unknown move `{l}` (expected one of {})", known.join(", ")),
                    )
                })
            })
            .collect::<Result<_>>()
            .map(Strategy::PureClassical),
        SpecForm::Mixed(ps) => {
            if space.moves.len() != 2 {
                return Err(err(0, "mixed: needs a two-move alphabet"));
            }
            Ok(Strategy::MixedClassical(
                ps.into_iter().map(|p| vec![1.0 - p, p]).collect(),
            ))
        }
        SpecForm::U2(triples) => triples
            .into_iter()
            .map(|[a, p1, p2]| u2_angles(a, p1, p2))
            .collect::<Result<_>>()
            .map(Strategy::QuantumUnitary),
    }
}
