//! qbsolv-compatible `.qubo` files plus a JSON sidecar carrying the offset,
//! statistics and the variable table.
//!
//! The wire format has no offset field, so the offset also travels in a
//! `c offset <int>` comment line which the reader honors.

use super::{QuboBuilder, QuboInstance, VarEntry, VarId, VarKind, VarRegistry};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub num_vars: usize,
    pub offset: i64,
    pub density: f64,
    pub max_abs_coeff: i64,
    pub variables: BTreeMap<u32, VarEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<u32, u8>>,
}

/// Writes `<prefix>.qubo` and `<prefix>.meta.json`.
pub fn write_qubo(
    prefix: &Path,
    q: &QuboInstance,
    registry: &VarRegistry,
    witness: Option<&[bool]>,
) -> Result<()> {
    let qubo_path = prefix.with_extension("qubo");
    let meta_path = prefix.with_extension("meta.json");

    let max_index = q
        .linear()
        .keys()
        .map(|v| v.index())
        .chain(q.quadratic().keys().map(|&(_, j)| j.index()))
        .max()
        .map(|m| m + 1)
        .unwrap_or(0)
        .max(q.num_vars());

    let mut out = std::io::BufWriter::new(std::fs::File::create(&qubo_path)?);
    writeln!(out, "c quboc instance")?;
    if q.offset() != 0 {
        writeln!(out, "c offset {}", q.offset())?;
    }
    writeln!(
        out,
        "p qubo 0 {} {} {}",
        max_index,
        q.linear().len(),
        q.quadratic().len()
    )?;
    for (v, c) in q.linear() {
        writeln!(out, "{} {} {}", v.0, v.0, c)?;
    }
    for (&(i, j), c) in q.quadratic() {
        writeln!(out, "{} {} {}", i.0, j.0, c)?;
    }
    out.flush()?;

    let stats = q.stats();
    let meta = InstanceMeta {
        num_vars: q.num_vars(),
        offset: q.offset(),
        density: stats.density,
        max_abs_coeff: stats.max_abs_coeff,
        variables: registry
            .iter()
            .map(|(id, e)| (id.0, e.clone()))
            .collect(),
        witness: witness.map(|w| {
            w.iter()
                .enumerate()
                .map(|(i, &b)| (i as u32, b as u8))
                .collect()
        }),
    };
    let f = std::fs::File::create(&meta_path)?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), &meta)?;
    Ok(())
}

/// Reads a `.qubo` file, consulting `<stem>.meta.json` when present. Without
/// a sidecar the registry is synthesized with placeholder names.
pub fn read_qubo(path: &Path) -> Result<(QuboInstance, VarRegistry, Option<InstanceMeta>)> {
    let meta_path = path.with_extension("meta.json");
    let meta: Option<InstanceMeta> = if meta_path.exists() {
        let f = std::fs::File::open(&meta_path)?;
        Some(serde_json::from_reader(BufReader::new(f))?)
    } else {
        None
    };

    let f = std::fs::File::open(path)?;
    let mut b = QuboBuilder::new();
    let mut seen_header = false;
    let mut declared: Option<(usize, usize, usize)> = None;
    let mut n_nodes = 0usize;
    let mut n_couplers = 0usize;
    let mut seen_pairs = std::collections::HashSet::new();

    for (lineno, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let parse_err = |msg: &str| Error::Parse {
            line: lineno,
            msg: msg.to_string(),
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            let mut it = rest.split_whitespace();
            if it.next() == Some("offset") {
                let v: i64 = it
                    .next()
                    .ok_or_else(|| parse_err("missing offset value"))?
                    .parse()
                    .map_err(|_| parse_err("bad offset value"))?;
                b.add_offset(v)?;
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            if seen_header {
                return Err(parse_err("duplicate problem header"));
            }
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 5 || parts[0] != "qubo" {
                return Err(parse_err("expected `p qubo 0 <vars> <nodes> <couplers>`"));
            }
            let nums: Vec<usize> = parts[1..]
                .iter()
                .map(|s| s.parse().map_err(|_| parse_err("bad header field")))
                .collect::<Result<_>>()?;
            declared = Some((nums[1], nums[2], nums[3]));
            b.reserve_vars(nums[1]);
            seen_header = true;
            continue;
        }
        if !seen_header {
            return Err(parse_err("data line before problem header"));
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err("expected `<i> <j> <w>`"));
        }
        let i: u32 = parts[0].parse().map_err(|_| parse_err("bad index"))?;
        let j: u32 = parts[1].parse().map_err(|_| parse_err("bad index"))?;
        let w: i64 = parts[2].parse().map_err(|_| parse_err("bad weight"))?;
        if i > j {
            return Err(parse_err("coupler indices must satisfy i <= j"));
        }
        if !seen_pairs.insert((i, j)) {
            return Err(parse_err("duplicate node/coupler line"));
        }
        if i == j {
            n_nodes += 1;
            b.add_linear(VarId(i), w)?;
        } else {
            n_couplers += 1;
            b.add_quadratic(VarId(i), VarId(j), w)?;
        }
    }
    if !seen_header {
        return Err(Error::Parse {
            line: 0,
            msg: "missing problem header".to_string(),
        });
    }
    if let Some((_, dn, dc)) = declared {
        if dn != n_nodes || dc != n_couplers {
            return Err(Error::Parse {
                line: 0,
                msg: format!(
                    "header declares {dn} nodes / {dc} couplers, found {n_nodes} / {n_couplers}"
                ),
            });
        }
    }
    if let Some(m) = &meta {
        b.reserve_vars(m.num_vars);
    }
    let q = b.build();

    let registry = match &meta {
        Some(m) => {
            let mut reg = VarRegistry::new();
            for i in 0..q.num_vars() as u32 {
                match m.variables.get(&i) {
                    Some(e) => reg.fresh(e.name.clone(), e.kind, &e.origin)?,
                    None => reg.fresh(format!("x{i}"), VarKind::Intermediate, "file")?,
                };
            }
            reg
        }
        None => {
            let mut reg = VarRegistry::new();
            for i in 0..q.num_vars() as u32 {
                reg.fresh(format!("x{i}"), VarKind::Intermediate, "file")?;
            }
            reg
        }
    };
    Ok((q, registry, meta))
}
