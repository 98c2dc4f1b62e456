//! A minimal s-expression circuit DSL for hand-written tests.
//!
//! ```text
//! (inputs a b c)
//! (def t (and a (not b)))
//! (outputs (xor t c) (or a b c))
//! ```
//!
//! Operators: `not`, `and`, `or`, `nand`, `nor`, `xor`, `xnor`, `imply`,
//! `nimply`, `cimply`, `cnimply`, plus the constants `true`/`false`.
//! `and`/`or`/`xor` accept two or more arguments (folded left); `def` binds
//! a named intermediate so it can be shared.

use super::{Circuit, NodeId, Op};
use crate::error::{Error, Result};
use std::collections::HashMap;

#[derive(Debug, Clone)]
enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

struct Tokenizer<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Tokenizer<'a> {
    fn next(&mut self) -> Option<(String, usize)> {
        loop {
            let mut chars = self.rest.char_indices();
            match chars.next() {
                None => return None,
                Some((i, c)) if c.is_whitespace() => {
                    if c == '\n' {
                        self.line += 1;
                    }
                    self.rest = &self.rest[i + c.len_utf8()..];
                }
                Some((_, ';')) => {
                    // comment to end of line
                    match self.rest.find('\n') {
                        Some(nl) => {
                            self.line += 1;
                            self.rest = &self.rest[nl + 1..];
                        }
                        None => self.rest = "",
                    }
                }
                Some((i, '(')) | Some((i, ')')) => {
                    let tok = self.rest[i..i + 1].to_string();
                    self.rest = &self.rest[i + 1..];
                    return Some((tok, self.line));
                }
                Some((start, _)) => {
                    let end = self.rest[start..]
                        .find(|c: char| c.is_whitespace() || c == '(' || c == ')' || c == ';')
                        .map(|e| start + e)
                        .unwrap_or(self.rest.len());
                    let tok = self.rest[start..end].to_string();
                    self.rest = &self.rest[end..];
                    return Some((tok, self.line));
                }
            }
        }
    }
}

fn parse_expr(toks: &mut Tokenizer, first: (String, usize)) -> Result<SExpr> {
    let err = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    if first.0 == "(" {
        let mut items = Vec::new();
        loop {
            match toks.next() {
                None => return Err(err(first.1, "unclosed parenthesis")),
                Some((t, _)) if t == ")" => return Ok(SExpr::List(items)),
                Some(t) => items.push(parse_expr(toks, t)?),
            }
        }
    } else if first.0 == ")" {
        Err(err(first.1, "unexpected `)`"))
    } else {
        Ok(SExpr::Atom(first.0))
    }
}

struct Builder {
    circuit: Circuit,
    names: HashMap<String, NodeId>,
}

impl Builder {
    fn lower(&mut self, e: &SExpr, line: usize) -> Result<NodeId> {
        let err = |msg: String| Error::Parse { line, msg };
        match e {
            SExpr::Atom(a) => match a.as_str() {
                "true" | "1" => Ok(self.circuit.constant(true)),
                "false" | "0" => Ok(self.circuit.constant(false)),
                name => self
                    .names
                    .get(name)
                    .copied()
                    .ok_or_else(|| err(format!("unknown name `{name}`"))),
            },
            SExpr::List(items) => {
                let head = match items.first() {
                    Some(SExpr::Atom(h)) => h.as_str(),
                    _ => return Err(err("expected operator".into())),
                };
                let args: Vec<NodeId> = items[1..]
                    .iter()
                    .map(|a| self.lower(a, line))
                    .collect::<Result<_>>()?;
                let op = match head {
                    "not" => {
                        if args.len() != 1 {
                            return Err(err("`not` takes one argument".into()));
                        }
                        return self.circuit.not(args[0]);
                    }
                    "and" => Op::And,
                    "or" => Op::Or,
                    "xor" => Op::Xor,
                    "nand" => Op::Nand,
                    "nor" => Op::Nor,
                    "xnor" => Op::Xnor,
                    "imply" => Op::Imply,
                    "nimply" => Op::Nimply,
                    "cimply" => Op::Cimply,
                    "cnimply" => Op::Cnimply,
                    other => return Err(err(format!("unknown operator `{other}`"))),
                };
                let variadic = matches!(op, Op::And | Op::Or | Op::Xor);
                if args.len() < 2 || (!variadic && args.len() != 2) {
                    return Err(err(format!("`{head}` arity mismatch")));
                }
                let mut acc = self.circuit.gate(op, args[0], args[1])?;
                for &a in &args[2..] {
                    acc = self.circuit.gate(op, acc, a)?;
                }
                Ok(acc)
            }
        }
    }
}

/// Parses the s-expression DSL from source text.
pub fn parse_sexpr(src: &str) -> Result<Circuit> {
    let mut toks = Tokenizer { rest: src, line: 1 };
    let mut forms = Vec::new();
    while let Some(t) = toks.next() {
        let line = t.1;
        forms.push((parse_expr(&mut toks, t)?, line));
    }
    let mut b = Builder {
        circuit: Circuit::new(),
        names: HashMap::new(),
    };
    let mut have_outputs = false;
    for (form, line) in &forms {
        let err = |msg: &str| Error::Parse {
            line: *line,
            msg: msg.to_string(),
        };
        let items = match form {
            SExpr::List(items) if !items.is_empty() => items,
            _ => return Err(err("expected a top-level form")),
        };
        let head = match &items[0] {
            SExpr::Atom(h) => h.as_str(),
            _ => return Err(err("expected form head")),
        };
        match head {
            "inputs" => {
                for item in &items[1..] {
                    match item {
                        SExpr::Atom(name) => {
                            if b.names.contains_key(name) {
                                return Err(err("duplicate input name"));
                            }
                            let id = b.circuit.input(name.clone());
                            b.names.insert(name.clone(), id);
                        }
                        _ => return Err(err("input names must be atoms")),
                    }
                }
            }
            "def" => {
                if items.len() != 3 {
                    return Err(err("`def` takes a name and an expression"));
                }
                let name = match &items[1] {
                    SExpr::Atom(n) => n.clone(),
                    _ => return Err(err("`def` name must be an atom")),
                };
                let id = b.lower(&items[2], *line)?;
                if b.names.insert(name, id).is_some() {
                    return Err(err("duplicate definition"));
                }
            }
            "outputs" => {
                have_outputs = true;
                for item in &items[1..] {
                    let id = b.lower(item, *line)?;
                    b.circuit.mark_output(id);
                }
            }
            other => {
                return Err(err(&format!("unknown form `{other}`")));
            }
        }
    }
    if !have_outputs {
        return Err(Error::Parse {
            line: 0,
            msg: "no (outputs …) form".to_string(),
        });
    }
    Ok(b.circuit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_evaluates() {
        let c = parse_sexpr(
            "(inputs a b c)\n; a comment\n(def t (and a (not b)))\n(outputs (xor t c) (or a b c))",
        )
        .unwrap();
        assert_eq!(c.inputs().len(), 3);
        assert_eq!(c.outputs().len(), 2);
        // a=1 b=0 c=1: t=1, xor=0, or=1
        assert_eq!(c.eval(&[true, false, true]).unwrap(), vec![false, true]);
    }

    #[test]
    fn variadic_fold() {
        let c = parse_sexpr("(inputs a b c d)(outputs (xor a b c d))").unwrap();
        assert_eq!(c.eval(&[true, true, true, false]).unwrap(), vec![true]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_sexpr("(inputs a)\n(outputs (bogus a a))").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(parse_sexpr("(inputs a)").is_err());
        assert!(parse_sexpr("(inputs a)(outputs (xor a b))").is_err());
    }
}
