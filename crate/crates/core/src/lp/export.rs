//! CPLEX LP text format.

use std::fmt::Write;

use super::model::{LpModel, Sense};
use crate::error::{Error, Result};

const TERMS_PER_LINE: usize = 6;

fn valid_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "!\"#$%&()/,.;?@_`'{}|~".contains(c)
}

/// Replaces characters the format does not allow and guards a leading digit
/// or period.
fn sanitize(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if valid_name_char(c) { c } else { '_' })
        .collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        s.insert(0, '_');
    }
    if matches!(s.to_ascii_lowercase().as_str(), "e" | "inf" | "infinity" | "free") {
        s.insert(0, '_');
    }
    s
}

fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

fn write_terms(out: &mut String, terms: impl Iterator<Item = (String, f64)>) {
    let mut count = 0;
    for (name, v) in terms {
        if count > 0 && count % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if v.is_sign_negative() { '-' } else { '+' };
        write!(out, " {sign} {} {name}", num(v.abs())).expect("write to string");
        count += 1;
    }
    if count == 0 {
        out.push_str(" 0");
    }
}

/// Renders the model; the objective is written as `Maximize`.
pub fn write_lp(model: &LpModel) -> String {
    let names: Vec<String> = model.names().iter().map(|n| sanitize(n)).collect();
    let mut out = String::from("\\ written by aqec\nMaximize\n obj:");
    write_terms(
        &mut out,
        model
            .objective()
            .iter()
            .enumerate()
            .map(|(j, &c)| (names[j].clone(), c)),
    );
    out.push_str("\nSubject To\n");
    for (i, c) in model.constraints().iter().enumerate() {
        let label = if c.name.is_empty() {
            format!("r{i}")
        } else {
            sanitize(&c.name)
        };
        write!(out, " {label}:").expect("write to string");
        write_terms(&mut out, c.coeffs.iter().map(|&(j, v)| (names[j].clone(), v)));
        let op = match c.sense {
            Sense::Eq => "=",
            Sense::Le => "<=",
        };
        writeln!(out, " {op} {}", num(c.rhs)).expect("write to string");
    }
    out.push_str("Bounds\n");
    for (j, name) in names.iter().enumerate() {
        let (l, u) = (model.lower()[j], model.upper()[j]);
        if l == f64::NEG_INFINITY && u == f64::INFINITY {
            writeln!(out, " {name} free").expect("write to string");
        } else if l == u {
            writeln!(out, " {name} = {}", num(l)).expect("write to string");
        } else {
            writeln!(out, " {} <= {name} <= {}", num(l), num(u)).expect("write to string");
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Label(String),
    Plus,
    Minus,
    Cmp(Sense, bool),
}

fn parse_num(s: &str) -> Option<f64> {
    match s.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" | "+infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        _ => {
            if s.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
                s.parse().ok()
            } else {
                None
            }
        }
    }
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '+' {
            toks.push(Tok::Plus);
            i += 1;
        } else if c == '-' {
            toks.push(Tok::Minus);
            i += 1;
        } else if "<>=".contains(c) {
            let mut j = i;
            while j < chars.len() && "<>=".contains(chars[j]) {
                j += 1;
            }
            let op: String = chars[i..j].iter().collect();
            toks.push(match op.as_str() {
                "<" | "<=" | "=<" => Tok::Cmp(Sense::Le, false),
                ">" | ">=" | "=>" => Tok::Cmp(Sense::Le, true),
                "=" => Tok::Cmp(Sense::Eq, false),
                _ => {
                    return Err(Error::LpParse {
                        line,
                        msg: format!("unknown operator {op}"),
                    })
                }
            });
            i = j;
        } else {
            let mut j = i;
            while j < chars.len() && !chars[j].is_whitespace() && !"+-<>=:".contains(chars[j]) {
                j += 1;
            }
            // exponent sign inside a number
            while j < chars.len()
                && "+-".contains(chars[j])
                && chars[i].is_ascii_digit()
                && matches!(chars[j - 1], 'e' | 'E')
            {
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
            let word: String = chars[i..j].iter().collect();
            if j < chars.len() && chars[j] == ':' {
                toks.push(Tok::Label(word));
                j += 1;
            } else if let Some(v) = parse_num(&word) {
                toks.push(Tok::Num(v));
            } else {
                toks.push(Tok::Name(word));
            }
            i = j;
        }
    }
    Ok(toks)
}

struct LinExpr {
    terms: Vec<(String, f64)>,
}

/// Parses `[+|-] [coef] name ...` until a comparison or label.
fn parse_expr(toks: &[Tok], pos: &mut usize, line: usize) -> Result<LinExpr> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    while *pos < toks.len() {
        match &toks[*pos] {
            Tok::Plus => {}
            Tok::Minus => sign = -sign,
            Tok::Num(v) => coef = Some(coef.unwrap_or(1.0) * v),
            Tok::Name(n) => {
                terms.push((n.clone(), sign * coef.unwrap_or(1.0)));
                sign = 1.0;
                coef = None;
            }
            Tok::Cmp(..) | Tok::Label(_) => break,
        }
        *pos += 1;
    }
    if coef.is_some_and(|c| c != 0.0) {
        return Err(Error::LpParse {
            line,
            msg: "constant term in expression".into(),
        });
    }
    Ok(LinExpr { terms })
}

fn signed_number(toks: &[Tok], pos: &mut usize, line: usize) -> Result<f64> {
    let mut sign = 1.0;
    while *pos < toks.len() {
        match &toks[*pos] {
            Tok::Plus => {}
            Tok::Minus => sign = -sign,
            Tok::Num(v) => {
                *pos += 1;
                return Ok(sign * v);
            }
            other => {
                return Err(Error::LpParse {
                    line,
                    msg: format!("expected a number, found {other:?}"),
                })
            }
        }
        *pos += 1;
    }
    Err(Error::LpParse {
        line,
        msg: "expected a number".into(),
    })
}

#[derive(PartialEq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    End,
}

fn header(line: &str) -> Option<(Section, bool)> {
    let l = line.trim().to_ascii_lowercase();
    match l.as_str() {
        "maximize" | "maximise" | "maximum" | "max" => Some((Section::Objective, true)),
        "minimize" | "minimise" | "minimum" | "min" => Some((Section::Objective, false)),
        "subject to" | "such that" | "st" | "s.t." | "st." => Some((Section::Constraints, false)),
        "bounds" | "bound" => Some((Section::Bounds, false)),
        "end" => Some((Section::End, false)),
        _ => None,
    }
}

/// Reads the subset of the format produced by [`write_lp`]: objective,
/// linear rows and bounds. A `Minimize` objective is negated so the model
/// always maximizes.
pub fn parse_lp(text: &str) -> Result<LpModel> {
    let mut section = Section::None;
    let mut maximize = true;
    let mut obj_text = String::new();
    let mut obj_line = 0;
    let mut con_lines: Vec<(usize, String)> = Vec::new();
    let mut bound_lines: Vec<(usize, String)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if let Some((s, max)) = header(line) {
            if s == Section::Objective {
                maximize = max;
                obj_line = k + 1;
            }
            section = s;
            continue;
        }
        match section {
            Section::Objective => {
                obj_text.push(' ');
                obj_text.push_str(line);
            }
            Section::Constraints => con_lines.push((k + 1, line.to_string())),
            Section::Bounds => bound_lines.push((k + 1, line.to_string())),
            Section::None | Section::End => {
                return Err(Error::LpParse {
                    line: k + 1,
                    msg: "text outside of a section".into(),
                })
            }
        }
    }

    let mut model = LpModel::new();
    let mut index = std::collections::HashMap::new();
    let mut var = |model: &mut LpModel, name: &str| -> usize {
        *index
            .entry(name.to_string())
            .or_insert_with(|| model.add_var(name, 0.0, f64::INFINITY))
    };

    let toks = tokenize(&obj_text, obj_line)?;
    let mut pos = 0;
    if let Some(Tok::Label(_)) = toks.first() {
        pos = 1;
    }
    let obj = parse_expr(&toks, &mut pos, obj_line)?;
    for (name, c) in obj.terms {
        let j = var(&mut model, &name);
        let prev = model.objective()[j];
        model.set_objective_coeff(j, prev + if maximize { c } else { -c });
    }

    let mut start = 0;
    let joined: String = con_lines.iter().map(|(_, l)| format!("{l} ")).collect();
    let first_line = con_lines.first().map_or(0, |l| l.0);
    let toks = tokenize(&joined, first_line)?;
    let mut count = 0;
    while start < toks.len() {
        let mut pos = start;
        let label = match &toks[pos] {
            Tok::Label(l) => {
                pos += 1;
                l.clone()
            }
            _ => format!("r{count}"),
        };
        let expr = parse_expr(&toks, &mut pos, first_line)?;
        let (sense, flip) = match toks.get(pos) {
            Some(Tok::Cmp(s, f)) => (*s, *f),
            _ => {
                return Err(Error::LpParse {
                    line: first_line,
                    msg: format!("row {label} has no comparison"),
                })
            }
        };
        pos += 1;
        let rhs = signed_number(&toks, &mut pos, first_line)?;
        let coeffs: Vec<(usize, f64)> = expr
            .terms
            .iter()
            .map(|(n, c)| (var(&mut model, n), *c))
            .collect();
        match (sense, flip) {
            (Sense::Eq, _) => model.add_eq(label, coeffs, rhs)?,
            (Sense::Le, false) => model.add_le(label, coeffs, rhs)?,
            (Sense::Le, true) => model.add_ge(label, coeffs, rhs)?,
        };
        count += 1;
        start = pos;
    }

    for (line, text) in bound_lines {
        let toks = tokenize(&text, line)?;
        let err = |msg: &str| Error::LpParse {
            line,
            msg: msg.to_string(),
        };
        if let [Tok::Name(n), Tok::Name(f)] = toks.as_slice() {
            if f.eq_ignore_ascii_case("free") {
                let j = var(&mut model, n);
                model.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
                continue;
            }
        }
        let name_pos = toks
            .iter()
            .position(|t| matches!(t, Tok::Name(_)))
            .ok_or_else(|| err("bound without a variable"))?;
        let Tok::Name(name) = &toks[name_pos] else { unreachable!() };
        let j = var(&mut model, name);
        let (mut lo, mut up) = (model.lower()[j], model.upper()[j]);
        let mut pos = 0;
        if name_pos > 0 {
            let v = signed_number(&toks, &mut pos, line)?;
            match toks.get(pos) {
                Some(Tok::Cmp(Sense::Le, false)) => lo = v,
                Some(Tok::Cmp(Sense::Le, true)) => up = v,
                Some(Tok::Cmp(Sense::Eq, _)) => (lo, up) = (v, v),
                _ => return Err(err("malformed bound")),
            }
        }
        let mut pos = name_pos + 1;
        if pos < toks.len() {
            let cmp = toks[pos].clone();
            pos += 1;
            let v = signed_number(&toks, &mut pos, line)?;
            match cmp {
                Tok::Cmp(Sense::Le, false) => up = v,
                Tok::Cmp(Sense::Le, true) => lo = v,
                Tok::Cmp(Sense::Eq, _) => (lo, up) = (v, v),
                _ => return Err(err("malformed bound")),
            }
        }
        model.set_bounds(j, lo, up);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_model() {
        let text = write_lp(&LpModel::new());
        assert_eq!(text, "\\ written by aqec\nMaximize\n obj: 0\nSubject To\nBounds\nEnd\n");
        assert_eq!(parse_lp(&text).unwrap(), LpModel::new());
    }

    #[test]
    fn round_trip() {
        let mut m = LpModel::new();
        let x = m.add_var("x[0]", 0.0, f64::INFINITY);
        let y = m.add_var("y", -1.5, 2e-7);
        let z = m.add_var("z", f64::NEG_INFINITY, f64::INFINITY);
        let w = m.add_var("w", 3.0, 3.0);
        m.add_le("c0", vec![(x, 1.0), (y, -2.5e-12)], 4.0).unwrap();
        m.add_eq("c1", vec![(y, 1.0 / 3.0), (z, 1.0), (w, 1.0)], -0.1).unwrap();
        m.add_ge("c2", (0..4).flat_map(|_| [(x, 1.0), (z, 1e10)]).collect(), 1.0).unwrap();
        m.set_objective_coeff(y, 1.0);
        m.set_objective_coeff(z, -0.25);
        let back = parse_lp(&write_lp(&m)).unwrap();
        assert_eq!(back.names()[0], "x_0_");
        assert_eq!(back.objective(), m.objective());
        assert_eq!(back.lower(), m.lower());
        assert_eq!(back.upper(), m.upper());
        assert_eq!(back.constraints().len(), 3);
        for (a, b) in back.constraints().iter().zip(m.constraints()) {
            assert_eq!((&a.coeffs, a.sense, a.rhs), (&b.coeffs, b.sense, b.rhs));
        }
    }

    #[test]
    fn foreign_syntax() {
        let text = "Minimize\n cost: 2 x + y\nSubject To\n a: x + y >= 1\n x - y < 3\nBounds\n x <= 4\n y >= -2\nEnd\n";
        let m = parse_lp(text).unwrap();
        assert_eq!(m.objective(), &[-2.0, -1.0]);
        assert_eq!(m.upper()[0], 4.0);
        assert_eq!(m.lower()[1], -2.0);
        assert_eq!(m.constraints()[0].coeffs, vec![(0, -1.0), (1, -1.0)]);
        assert!(parse_lp("Subject To\n a: x + 1 <= 2\n").is_err());
    }
}
