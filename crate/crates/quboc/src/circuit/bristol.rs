//! Bristol-fashion circuit file parser.
//!
//! Layout: a header line `<n_gates> <n_wires>`, a line `<n_inputs>
//! <width_1> … <width_n>`, a line `<n_outputs> <width_1> … <width_m>`, then
//! one gate per line: `<n_in> <n_out> <in_wires…> <out_wires…> <OP>` with
//! OP ∈ {XOR, AND, INV, EQ, EQW, MAND}. Input values occupy the lowest
//! wire numbers in declaration order; output values the highest.

use super::{Circuit, NodeId, Op};
use crate::error::{Error, Result};
use std::path::Path;

pub fn parse_bristol(path: &Path) -> Result<Circuit> {
    parse_bristol_str(&std::fs::read_to_string(path)?)
}

pub fn parse_bristol_str(src: &str) -> Result<Circuit> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut header = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(0, &format!("missing {what} line")))?;
        let nums: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(ln, "expected an integer")))
            .collect::<Result<_>>()?;
        if nums.is_empty() {
            return Err(err(ln, &format!("empty {what} line")));
        }
        Ok((ln, nums))
    };

    let (hl, counts) = header("header")?;
    if counts.len() != 2 {
        return Err(err(hl, "header must be `<n_gates> <n_wires>`"));
    }
    let (n_gates, n_wires) = (counts[0], counts[1]);
    let (il, ins) = header("input declaration")?;
    if ins.len() != ins[0] + 1 {
        return Err(err(il, "input declaration count mismatch"));
    }
    let (ol, outs) = header("output declaration")?;
    if outs.len() != outs[0] + 1 {
        return Err(err(ol, "output declaration count mismatch"));
    }
    let total_in: usize = ins[1..].iter().sum();
    let total_out: usize = outs[1..].iter().sum();
    if total_in + total_out > n_wires {
        return Err(err(hl, "wire count smaller than declared I/O"));
    }

    let mut c = Circuit::new();
    let mut wire: Vec<Option<NodeId>> = vec![None; n_wires];
    for (w, slot) in wire.iter_mut().enumerate().take(total_in) {
        *slot = Some(c.input(format!("w{w}")));
    }

    let mut seen_gates = 0usize;
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(err(ln, "short gate line"));
        }
        let op = *toks.last().unwrap();
        let nums: Vec<usize> = toks[..toks.len() - 1]
            .iter()
            .map(|t| t.parse().map_err(|_| err(ln, "expected a wire number")))
            .collect::<Result<_>>()?;
        let (n_in, n_out) = (nums[0], nums[1]);
        if nums.len() != 2 + n_in + n_out {
            return Err(err(ln, "gate arity mismatch"));
        }
        let in_f = &nums[2..2 + n_in];
        let out_f = &nums[2 + n_in..];
        let get = |wire_vec: &[Option<NodeId>], w: usize| -> Result<NodeId> {
            if w >= n_wires {
                return Err(err(ln, "wire index out of range"));
            }
            wire_vec[w].ok_or_else(|| err(ln, "use of undriven wire"))
        };
        let set = |wire_vec: &mut [Option<NodeId>], w: usize, id: NodeId| -> Result<()> {
            if w >= n_wires {
                return Err(err(ln, "wire index out of range"));
            }
            if wire_vec[w].is_some() {
                return Err(err(ln, "wire driven twice"));
            }
            wire_vec[w] = Some(id);
            Ok(())
        };
        match op {
            "XOR" | "AND" => {
                if n_in != 2 || n_out != 1 {
                    return Err(err(ln, "XOR/AND must be 2-in 1-out"));
                }
                let a = get(&wire, in_f[0])?;
                let b = get(&wire, in_f[1])?;
                let id = c.gate(if op == "XOR" { Op::Xor } else { Op::And }, a, b)?;
                set(&mut wire, out_f[0], id)?;
            }
            "INV" => {
                if n_in != 1 || n_out != 1 {
                    return Err(err(ln, "INV must be 1-in 1-out"));
                }
                let a = get(&wire, in_f[0])?;
                let id = c.not(a)?;
                set(&mut wire, out_f[0], id)?;
            }
            "EQ" => {
                // the "input" field is a constant bit, not a wire
                if n_in != 1 || n_out != 1 || in_f[0] > 1 {
                    return Err(err(ln, "EQ must be `1 1 <0|1> <wire> EQ`"));
                }
                let id = c.constant(in_f[0] == 1);
                set(&mut wire, out_f[0], id)?;
            }
            "EQW" => {
                if n_in != 1 || n_out != 1 {
                    return Err(err(ln, "EQW must be 1-in 1-out"));
                }
                let id = get(&wire, in_f[0])?;
                set(&mut wire, out_f[0], id)?;
            }
            "MAND" => {
                if n_out == 1 {
                    // multi-input AND
                    let mut acc = get(&wire, in_f[0])?;
                    for &w in &in_f[1..] {
                        let b = get(&wire, w)?;
                        acc = c.gate(Op::And, acc, b)?;
                    }
                    set(&mut wire, out_f[0], acc)?;
                } else if n_in == 2 * n_out {
                    // vectorized AND of two n_out-bit operands
                    for (k, &ow) in out_f.iter().enumerate() {
                        let a = get(&wire, in_f[k])?;
                        let b = get(&wire, in_f[n_out + k])?;
                        let id = c.gate(Op::And, a, b)?;
                        set(&mut wire, ow, id)?;
                    }
                } else {
                    return Err(err(ln, "MAND shape not recognized"));
                }
            }
            other => return Err(err(ln, &format!("unknown gate `{other}`"))),
        }
        seen_gates += 1;
    }
    if seen_gates != n_gates {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header declares {n_gates} gates, found {seen_gates}"),
        });
    }
    for w in n_wires - total_out..n_wires {
        let id = wire[w].ok_or_else(|| err(0, &format!("output wire {w} undriven")))?;
        c.mark_output(id);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_xor_gate() {
        let c = parse_bristol_str("1 3\n2 1 1\n1 1\n\n2 1 0 1 2 XOR\n").unwrap();
        assert_eq!(c.inputs().len(), 2);
        assert_eq!(c.eval(&[true, false]).unwrap(), vec![true]);
        assert_eq!(c.eval(&[true, true]).unwrap(), vec![false]);
    }

    #[test]
    fn inv_eq_eqw() {
        // w2 = !w0; w3 = const 1; w4 = copy of w1 — outputs w2 w3 w4
        let src = "3 5\n2 1 1\n1 3\n\n1 1 0 2 INV\n1 1 1 3 EQ\n1 1 1 4 EQW\n";
        let c = parse_bristol_str(src).unwrap();
        assert_eq!(
            c.eval(&[false, true]).unwrap(),
            vec![true, true, true]
        );
    }

    #[test]
    fn mand_expands() {
        let src = "1 4\n3 1 1 1\n1 1\n\n3 1 0 1 2 3 MAND\n";
        let c = parse_bristol_str(src).unwrap();
        assert_eq!(c.eval(&[true, true, true]).unwrap(), vec![true]);
        assert_eq!(c.eval(&[true, false, true]).unwrap(), vec![false]);
    }

    #[test]
    fn malformed_lines_report_position() {
        let e = parse_bristol_str("1 3\n2 1 1\n1 1\n\n2 1 0 1 2 FROB\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, .. }));
        let e = parse_bristol_str("2 3\n2 1 1\n1 1\n\n2 1 0 1 2 XOR\n").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
    }
}
