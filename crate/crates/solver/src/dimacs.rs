//! DIMACS CNF (`p cnf V C`) and weighted partial WCNF (`p wcnf V C TOP`).

use std::fmt::Write as _;

use thiserror::Error;

use crate::{CnfInstance, PartialMaxSatInstance, SoftClause};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DimacsInstance {
    Cnf(CnfInstance),
    Wcnf(PartialMaxSatInstance),
}

fn write_clause(out: &mut String, prefix: Option<u64>, lits: &[i32]) {
    if let Some(w) = prefix {
        let _ = write!(out, "{w} ");
    }
    for l in lits {
        let _ = write!(out, "{l} ");
    }
    out.push_str("0\n");
}

impl CnfInstance {
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            write_clause(&mut out, None, c);
        }
        out
    }
}

impl PartialMaxSatInstance {
    /// Weight marking hard clauses: one more than the total soft weight.
    pub fn top(&self) -> u64 {
        1 + self.soft.iter().map(|s| s.weight).sum::<u64>()
    }

    pub fn to_wcnf(&self) -> String {
        let top = self.top();
        let mut out = format!(
            "p wcnf {} {} {}\n",
            self.hard.num_vars,
            self.hard.clauses.len() + self.soft.len(),
            top
        );
        for c in &self.hard.clauses {
            write_clause(&mut out, Some(top), c);
        }
        for s in &self.soft {
            write_clause(&mut out, Some(s.weight), &s.lits);
        }
        out
    }
}

enum Header {
    Cnf { vars: u32, clauses: usize },
    Wcnf { vars: u32, clauses: usize, top: u64 },
}

fn parse_header(line_no: usize, line: &str) -> Result<Header, FormatError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    let num = |i: usize| -> Result<u64, FormatError> {
        parts
            .get(i)
            .ok_or_else(|| err(line_no, "truncated header"))?
            .parse::<u64>()
            .map_err(|_| err(line_no, format!("bad header field '{}'", parts[i])))
    };
    match parts.get(1) {
        Some(&"cnf") if parts.len() == 4 => Ok(Header::Cnf {
            vars: u32::try_from(num(2)?).map_err(|_| err(line_no, "variable count too large"))?,
            clauses: num(3)? as usize,
        }),
        Some(&"wcnf") if parts.len() == 5 => Ok(Header::Wcnf {
            vars: u32::try_from(num(2)?).map_err(|_| err(line_no, "variable count too large"))?,
            clauses: num(3)? as usize,
            top: num(4)?,
        }),
        _ => Err(err(line_no, format!("unrecognised header '{line}'"))),
    }
}

/// Parses DIMACS CNF or WCNF text. Clauses may span lines; `c` lines are comments.
pub fn parse_dimacs(text: &str) -> Result<DimacsInstance, FormatError> {
    let mut header: Option<Header> = None;
    let mut clauses: Vec<(usize, Vec<i64>)> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut current_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "duplicate header"));
            }
            header = Some(parse_header(line_no, line)?);
            continue;
        }
        if header.is_none() {
            return Err(err(line_no, "clause before 'p' header"));
        }
        let weighted = matches!(header, Some(Header::Wcnf { .. }));
        for tok in line.split_whitespace() {
            if tok == "h" && weighted && current.is_empty() {
                current_line = line_no;
                current.push(-1);
                continue;
            }
            let v: i64 = tok
                .parse()
                .map_err(|_| err(line_no, format!("bad token '{tok}'")))?;
            if current.is_empty() {
                current_line = line_no;
            }
            if v == 0 {
                clauses.push((current_line, std::mem::take(&mut current)));
            } else {
                current.push(v);
            }
        }
    }
    if !current.is_empty() {
        return Err(err(current_line, "clause not terminated by 0"));
    }
    let header = header.ok_or_else(|| err(1, "missing 'p' header"))?;
    let check_lit = |line: usize, l: i64, vars: u32| -> Result<i32, FormatError> {
        if l.unsigned_abs() > vars as u64 {
            Err(err(
                line,
                format!("literal {l} out of range for {vars} variables"),
            ))
        } else {
            Ok(l as i32)
        }
    };
    match header {
        Header::Cnf { vars, clauses: n } => {
            if clauses.len() != n {
                return Err(err(
                    0,
                    format!("header declares {n} clauses, found {}", clauses.len()),
                ));
            }
            let mut out = Vec::with_capacity(n);
            for (line, c) in clauses {
                if c.is_empty() {
                    return Err(err(line, "empty clause"));
                }
                out.push(
                    c.iter()
                        .map(|&l| check_lit(line, l, vars))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            }
            Ok(DimacsInstance::Cnf(CnfInstance {
                num_vars: vars,
                clauses: out,
            }))
        }
        Header::Wcnf {
            vars,
            clauses: n,
            top,
        } => {
            if clauses.len() != n {
                return Err(err(
                    0,
                    format!("header declares {n} clauses, found {}", clauses.len()),
                ));
            }
            let mut hard = Vec::new();
            let mut soft = Vec::new();
            for (line, c) in clauses {
                let (&w, lits) = c.split_first().ok_or_else(|| err(line, "missing weight"))?;
                if lits.is_empty() {
                    return Err(err(line, "empty clause"));
                }
                let lits = lits
                    .iter()
                    .map(|&l| check_lit(line, l, vars))
                    .collect::<Result<Vec<_>, _>>()?;
                // `h` (new-style hard marker) was mapped to -1 above.
                if w == -1 || w as u64 >= top {
                    hard.push(lits);
                } else if w <= 0 {
                    return Err(err(line, format!("non-positive weight {w}")));
                } else {
                    soft.push(SoftClause {
                        lits,
                        weight: w as u64,
                    });
                }
            }
            Ok(DimacsInstance::Wcnf(PartialMaxSatInstance {
                hard: CnfInstance {
                    num_vars: vars,
                    clauses: hard,
                },
                soft,
            }))
        }
    }
}

/// Model echo line: `v 1 -2 3 0`.
pub fn format_model(model: &[bool]) -> String {
    let mut out = String::from("v");
    for (i, &b) in model.iter().enumerate() {
        let v = i as i64 + 1;
        let _ = write!(out, " {}", if b { v } else { -v });
    }
    out.push_str(" 0");
    out
}

/// Parses the `v ...` lines of a solver's output into a model of `num_vars` variables.
pub fn parse_model_lines(text: &str, num_vars: u32) -> Result<Vec<bool>, FormatError> {
    let mut model = vec![false; num_vars as usize];
    for (idx, line) in text.lines().enumerate() {
        let Some(rest) = line.trim().strip_prefix('v') else {
            continue;
        };
        for tok in rest.split_whitespace() {
            let l: i64 = tok
                .parse()
                .map_err(|_| err(idx + 1, format!("bad model literal '{tok}'")))?;
            if l == 0 {
                continue;
            }
            let v = l.unsigned_abs() as usize;
            if v > num_vars as usize {
                return Err(err(idx + 1, format!("model literal {l} out of range")));
            }
            model[v - 1] = l > 0;
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cnf_text_is_exact() {
        let inst = CnfInstance {
            num_vars: 2,
            clauses: vec![vec![1], vec![-1, 2]],
        };
        assert_eq!(inst.to_dimacs(), "p cnf 2 2\n1 0\n-1 2 0\n");
    }

    #[test]
    fn wcnf_top_is_one_plus_soft_weight() {
        let inst = PartialMaxSatInstance {
            hard: CnfInstance {
                num_vars: 1,
                clauses: vec![vec![1]],
            },
            soft: vec![SoftClause {
                lits: vec![-1],
                weight: 1,
            }],
        };
        let text = inst.to_wcnf();
        assert!(text.starts_with("p wcnf 1 2 2\n"), "{text}");
        assert_eq!(text, "p wcnf 1 2 2\n2 1 0\n1 -1 0\n");
    }

    #[test]
    fn out_of_range_literal_is_rejected() {
        let e = parse_dimacs("p cnf 1 1\n2 0\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn comments_and_multiline_clauses() {
        let text = "c hello\np cnf 3 2\n1 -2\n 3 0\nc mid\n-3 0\n";
        let DimacsInstance::Cnf(c) = parse_dimacs(text).unwrap() else {
            panic!()
        };
        assert_eq!(c.clauses, vec![vec![1, -2, 3], vec![-3]]);
    }

    #[test]
    fn model_line() {
        assert_eq!(format_model(&[true, false, true]), "v 1 -2 3 0");
        assert_eq!(
            parse_model_lines("s SATISFIABLE\nv 1 -2\nv 3 0\n", 3).unwrap(),
            vec![true, false, true]
        );
    }

    fn arb_cnf() -> impl Strategy<Value = CnfInstance> {
        (1u32..12).prop_flat_map(|v| {
            let lit = (1..=v as i32, any::<bool>()).prop_map(|(x, s)| if s { x } else { -x });
            prop::collection::vec(prop::collection::vec(lit, 1..5), 0..10).prop_map(
                move |clauses| CnfInstance {
                    num_vars: v,
                    clauses,
                },
            )
        })
    }

    proptest! {
        #[test]
        fn cnf_round_trip(inst in arb_cnf()) {
            prop_assert_eq!(parse_dimacs(&inst.to_dimacs()).unwrap(), DimacsInstance::Cnf(inst));
        }

        #[test]
        fn wcnf_round_trip(inst in arb_cnf(), soft in prop::collection::vec((1i32..4, 1u64..9), 0..6)) {
            let v = inst.num_vars as i32;
            let soft = soft.into_iter().map(|(l, w)| SoftClause { lits: vec![if l <= v { l } else { -v }], weight: w }).collect();
            let p = PartialMaxSatInstance { hard: inst, soft };
            prop_assert_eq!(parse_dimacs(&p.to_wcnf()).unwrap(), DimacsInstance::Wcnf(p));
        }
    }
}
