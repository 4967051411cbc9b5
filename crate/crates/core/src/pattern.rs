//! Plain-text pattern files.
//!
//! ```text
//! grid square
//! r 2
//! period 4 2
//! .#..
//! #...
//! ```
//!
//! Rows run from `j = py - 1` at the top down to `j = 0`; columns run from
//! `i = 0` on the left. `#` marks a codeword and `.` a non-codeword.

use std::fmt::Write;

use crate::code::PeriodicCode;
use crate::error::ParseError;
use crate::grid::{GridKind, Vertex};

/// A periodic code together with the radius it is meant to identify at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub code: PeriodicCode,
    pub r: u32,
}

fn keyword<'a>(
    line_no: usize,
    line: &'a str,
    key: &str,
) -> Result<Vec<(usize, &'a str)>, ParseError> {
    let mut fields = Vec::new();
    let mut col = 1;
    for part in line.split(' ') {
        if part.is_empty() {
            return Err(ParseError::new(line_no, col, "unexpected extra space"));
        }
        fields.push((col, part));
        col += part.len() + 1;
    }
    match fields.first() {
        Some(&(_, k)) if k == key => Ok(fields[1..].to_vec()),
        _ => Err(ParseError::new(line_no, 1, format!("expected `{key}`"))),
    }
}

fn positive(line_no: usize, (col, text): (usize, &str)) -> Result<u32, ParseError> {
    match text.parse::<u32>() {
        Ok(n) if n > 0 && text.bytes().all(|b| b.is_ascii_digit()) => Ok(n),
        _ => Err(ParseError::new(
            line_no,
            col,
            format!("`{text}` is not a positive integer"),
        )),
    }
}

fn arity<T>(line_no: usize, line: &str, fields: &[T], n: usize) -> Result<(), ParseError> {
    if fields.len() != n {
        let col = if fields.len() > n {
            line.len()
        } else {
            line.len() + 1
        };
        return Err(ParseError::new(
            line_no,
            col,
            format!("expected {n} value(s)"),
        ));
    }
    Ok(())
}

pub fn parse(text: &str) -> Result<Pattern, ParseError> {
    let mut lines: Vec<&str> = text.split('\n').collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    let line = |k: usize| -> Result<&str, ParseError> {
        lines
            .get(k)
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .ok_or_else(|| ParseError::new(k + 1, 1, "unexpected end of file"))
    };

    let l1 = line(0)?;
    let f = keyword(1, l1, "grid")?;
    arity(1, l1, &f, 1)?;
    let kind: GridKind = f[0]
        .1
        .parse()
        .map_err(|m: String| ParseError::new(1, f[0].0, m))?;

    let l2 = line(1)?;
    let f = keyword(2, l2, "r")?;
    arity(2, l2, &f, 1)?;
    let r = positive(2, f[0])?;

    let l3 = line(2)?;
    let f = keyword(3, l3, "period")?;
    arity(3, l3, &f, 2)?;
    let px = positive(3, f[0])?;
    let py = positive(3, f[1])?;
    if px > crate::code::MAX_PERIOD || py > crate::code::MAX_PERIOD {
        return Err(ParseError::new(3, f[0].0, "period too large"));
    }
    if kind == GridKind::Hex && (px % 2 == 1 || py % 2 == 1) {
        return Err(ParseError::new(3, f[0].0, "hex periods must be even"));
    }

    let mut offsets = Vec::new();
    for row in 0..py as usize {
        let line_no = 4 + row;
        let l = line(3 + row)?;
        let j = py as i64 - 1 - row as i64;
        let mut count = 0usize;
        for (k, ch) in l.chars().enumerate() {
            if k >= px as usize {
                return Err(ParseError::new(
                    line_no,
                    k + 1,
                    "row longer than the period",
                ));
            }
            match ch {
                '#' => offsets.push(Vertex::new(k as i64, j)),
                '.' => {}
                other => {
                    return Err(ParseError::new(
                        line_no,
                        k + 1,
                        format!("unexpected character `{other}`"),
                    ))
                }
            }
            count += 1;
        }
        if count < px as usize {
            return Err(ParseError::new(
                line_no,
                count + 1,
                "row shorter than the period",
            ));
        }
    }
    if lines.len() > 3 + py as usize {
        return Err(ParseError::new(
            4 + py as usize,
            1,
            "trailing content after the last row",
        ));
    }
    let code = PeriodicCode::new(kind, px, py, offsets)
        .map_err(|e| ParseError::new(4, 1, e.to_string()))?;
    Ok(Pattern { code, r })
}

pub fn format(pattern: &Pattern) -> String {
    let code = &pattern.code;
    let (px, py) = code.period();
    let mut out = String::new();
    writeln!(out, "grid {}", code.kind()).unwrap();
    writeln!(out, "r {}", pattern.r).unwrap();
    writeln!(out, "period {px} {py}").unwrap();
    for j in (0..py as i64).rev() {
        for i in 0..px as i64 {
            out.push(if code.offsets().contains(&Vertex::new(i, j)) {
                '#'
            } else {
                '.'
            });
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SAMPLE: &str = "grid square\nr 2\nperiod 4 2\n.#..\n#...\n";

    #[test]
    fn parses_rows_top_down() {
        let p = parse(SAMPLE).unwrap();
        assert_eq!(p.r, 2);
        assert_eq!(p.code.period(), (4, 2));
        let offs: Vec<_> = p.code.offsets().iter().copied().collect();
        assert_eq!(offs, vec![Vertex::new(0, 0), Vertex::new(1, 1)]);
        assert_eq!(format(&p), SAMPLE);
    }

    #[test]
    fn errors_carry_positions() {
        let cases = [
            ("grid triangle\nr 2\nperiod 1 1\n#\n", 1, 6),
            ("grid square\nr 0\nperiod 1 1\n#\n", 2, 3),
            ("grid square\nr 2\nperiod 2 x\n##\n", 3, 10),
            ("grid square\nr 2\nperiod 3 1\n#x#\n", 4, 2),
            ("grid square\nr 2\nperiod 3 2\n###\n##\n", 5, 3),
            ("grid square\nr 2\nperiod 2 1\n###\n", 4, 3),
            ("grid square\nr 2\nperiod 2 2\n##\n", 5, 1),
            ("grid hex\nr 2\nperiod 3 2\n###\n###\n", 3, 8),
            ("grid square\nr 2\nperiod 2 1\n..\n", 4, 1),
            ("grid square\nr 2\nperiod 1 1\n#\n#\n", 5, 1),
            ("square\n", 1, 1),
        ];
        for (text, line, column) in cases {
            let err = parse(text).unwrap_err();
            assert_eq!((err.line, err.column), (line, column), "{text:?}: {err}");
        }
    }

    proptest! {
        #[test]
        fn format_then_parse_is_identity(
            hex in any::<bool>(),
            a in 1u32..5,
            b in 1u32..5,
            r in 1u32..4,
            seed in proptest::collection::vec(any::<bool>(), 64),
        ) {
            let (kind, px, py) = if hex { (GridKind::Hex, 2 * a, 2 * b) } else { (GridKind::Square, a, b) };
            let mut offs: Vec<Vertex> = (0..px * py)
                .filter(|k| seed[*k as usize % 64])
                .map(|k| Vertex::new((k / py) as i64, (k % py) as i64))
                .collect();
            if offs.is_empty() {
                offs.push(Vertex::ORIGIN);
            }
            let p = Pattern { code: PeriodicCode::new(kind, px, py, offs).unwrap(), r };
            prop_assert_eq!(parse(&format(&p)).unwrap(), p);
        }
    }
}
