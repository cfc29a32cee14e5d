//! Dump/load in a small subset of the CPLEX LP format, for checking programs
//! against external solvers.
//!
//! Only what [`BinaryProgram`] can express is written: a `Minimize` objective,
//! one equality row per line under `Subject To`, and a `Binary` section.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::BinaryProgram;

#[derive(Debug, Error, PartialEq)]
pub enum LpFormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn sanitize(name: &str, i: usize) -> String {
    let ok = !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
        && !name.starts_with(|c: char| c.is_ascii_digit() || c == '.')
        && !name.eq_ignore_ascii_case("end");
    if ok {
        name.to_string()
    } else {
        format!("x{i}")
    }
}

impl BinaryProgram {
    pub fn to_lp_string(&self) -> String {
        let names: Vec<String> = self.names().iter().enumerate().map(|(i, n)| sanitize(n, i)).collect();
        let mut s = String::from("\\ crackgen binary program\nMinimize\n obj:");
        for (i, c) in self.costs().iter().enumerate() {
            write!(s, " + {c} {}", names[i]).unwrap();
        }
        s.push_str("\nSubject To\n");
        for (r, (row, b)) in self.rows().iter().zip(self.rhs()).enumerate() {
            write!(s, " r{r}:").unwrap();
            if row.is_empty() {
                s.push_str(" 0");
            }
            for &(v, c) in row {
                write!(s, " {} {}", if c > 0 { '+' } else { '-' }, names[v]).unwrap();
            }
            writeln!(s, " = {b}").unwrap();
        }
        s.push_str("Binary\n");
        for n in &names {
            writeln!(s, " {n}").unwrap();
        }
        s.push_str("End\n");
        s
    }

    pub fn from_lp_str(text: &str) -> Result<BinaryProgram, LpFormatError> {
        #[derive(PartialEq)]
        enum Section {
            Start,
            Objective,
            Constraints,
            Binary,
            End,
        }
        let mut section = Section::Start;
        let mut prog = BinaryProgram::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let err = |msg: String| LpFormatError::Parse { line: line_no, msg };
            let line = raw.split('\\').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.to_ascii_lowercase().as_str() {
                "minimize" => {
                    section = Section::Objective;
                    continue;
                }
                "subject to" => {
                    section = Section::Constraints;
                    continue;
                }
                "binary" | "binaries" => {
                    section = Section::Binary;
                    continue;
                }
                "end" => {
                    section = Section::End;
                    continue;
                }
                _ => {}
            }
            let body = line.split_once(':').map_or(line, |(_, b)| b);
            match section {
                Section::Objective => {
                    for (coef, name) in parse_terms(body).map_err(err)? {
                        if index.contains_key(&name) {
                            return Err(err(format!("variable {name} repeated in objective")));
                        }
                        index.insert(name.clone(), prog.add_var(coef, name));
                    }
                }
                Section::Constraints => {
                    let (lhs, rhs) = body.split_once('=').ok_or_else(|| err("expected '='".into()))?;
                    let rhs: i32 = rhs.trim().parse().map_err(|_| err(format!("bad right-hand side '{}'", rhs.trim())))?;
                    let mut row = Vec::new();
                    for (coef, name) in parse_terms(lhs).map_err(err)? {
                        let v = *index.get(&name).ok_or_else(|| err(format!("unknown variable {name}")))?;
                        let c = if coef == 1.0 { 1 } else if coef == -1.0 { -1 } else { return Err(err(format!("coefficient {coef} not in ±1"))) };
                        row.push((v, c));
                    }
                    prog.add_row(row, rhs);
                }
                Section::Binary => {
                    for name in body.split_whitespace() {
                        if !index.contains_key(name) {
                            return Err(err(format!("unknown binary variable {name}")));
                        }
                    }
                }
                Section::Start | Section::End => return Err(err(format!("unexpected text '{line}'"))),
            }
        }
        if section != Section::End {
            return Err(LpFormatError::Parse { line: text.lines().count(), msg: "missing End".into() });
        }
        Ok(prog)
    }
}

/// `[+|-] [coef] name ...`; a lone `0` is an empty expression.
fn parse_terms(expr: &str) -> Result<Vec<(f64, String)>, String> {
    let mut out = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for tok in expr.split_whitespace() {
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            _ => {
                if let Ok(c) = tok.parse::<f64>() {
                    if coef.is_some() {
                        return Err(format!("two coefficients in a row at '{tok}'"));
                    }
                    coef = Some(c);
                } else {
                    out.push((sign * coef.take().unwrap_or(1.0), tok.to_string()));
                    sign = 1.0;
                }
            }
        }
    }
    match coef {
        Some(c) if c == 0.0 && out.is_empty() => Ok(out),
        Some(_) => Err("dangling coefficient".into()),
        None => Ok(out),
    }
}
