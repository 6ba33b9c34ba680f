use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use fermroute::trotter::HamiltonianTerm;
use fermroute::{Circuit, Hamiltonian, Permutation, StandardKind, TernaryTree};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn permutation(path: &Path) -> Result<Permutation> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing permutation {}", path.display()))
}

pub fn circuit(path: &Path) -> Result<Circuit> {
    read(path)?
        .parse()
        .with_context(|| format!("parsing circuit {}", path.display()))
}

/// A standard encoding name, or a path to a tree JSON file.
pub fn tree(arg: &str, n: Option<usize>) -> Result<TernaryTree> {
    if let Ok(kind) = arg.parse::<StandardKind>() {
        let Some(n) = n else {
            bail!("--n is required for the named encoding {arg:?}");
        };
        return Ok(TernaryTree::standard(kind, n)?);
    }
    let path = Path::new(arg);
    if !path.exists() {
        bail!("{arg:?} is neither jw, parity, bk nor an existing tree file");
    }
    let tree = TernaryTree::from_json(&read(path)?).with_context(|| format!("parsing tree {arg}"))?;
    if let Some(n) = n.filter(|&n| n != tree.num_qubits()) {
        bail!("{arg} has {} qubits but --n is {n}", tree.num_qubits());
    }
    Ok(tree)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum HamiltonianFile {
    Full(Hamiltonian),
    Terms(Vec<HamiltonianTerm>),
}

pub fn hamiltonian(path: &Path) -> Result<Hamiltonian> {
    let parsed: HamiltonianFile = serde_json::from_str(&read(path)?)
        .with_context(|| format!("parsing Hamiltonian {}", path.display()))?;
    Ok(match parsed {
        HamiltonianFile::Full(h) => h,
        HamiltonianFile::Terms(terms) => Hamiltonian {
            num_modes: terms
                .iter()
                .flat_map(|t| t.modes())
                .max()
                .map_or(0, |m| m + 1),
            terms,
        },
    })
}

/// `ROWSxCOLS`.
pub fn grid(arg: &str) -> Result<(usize, usize)> {
    let parse = || -> Option<(usize, usize)> {
        let (r, c) = arg.split_once(['x', 'X'])?;
        Some((r.trim().parse().ok()?, c.trim().parse().ok()?))
    };
    match parse() {
        Some((r, c)) if r > 0 && c > 0 => Ok((r, c)),
        _ => bail!("--grid expects ROWSxCOLS, got {arg:?}"),
    }
}
